//! Orthonormal complex spherical harmonics on `S²` and the one-dimensional
//! polynomial families behind zonal kernels.
//!
//! `Y_lm(θ, φ) = s_m · P̄_l^{|m|}(cos θ) · e^{imφ}` with `s_m = 1` for
//! `m ≥ 0` and `(−1)^m` otherwise, where `P̄` carries the orthonormal
//! factor and the Condon–Shortley phase. The polar axis is `x₁`.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Flat index of `(l, m)` in a full coefficient vector.
#[inline]
pub fn lm_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Number of `(l, m)` pairs with `l ≤ l_max`.
#[inline]
pub fn lm_count(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

/// Offset of the `m`-block in an `m`-major table of `P̄_l^m`, `m ≤ l ≤ l_max`.
#[inline]
pub fn m_block_offset(l_max: usize, m: usize) -> usize {
    m * (l_max + 1) - m * m.saturating_sub(1) / 2
}

/// Length of an `m`-major table for degree `l_max`.
#[inline]
pub fn table_len(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 2) / 2
}

/// Fills `out` (`m`-major, `m ≤ l ≤ l_max`) with `P̄_l^m(x)` where
/// `sin_theta = √(1−x²)` is passed separately to keep accuracy near the poles.
pub fn normalized_legendre_into(l_max: usize, x: f64, sin_theta: f64, out: &mut [f64]) {
    debug_assert!(out.len() >= table_len(l_max));
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    let mut off = 0;
    for m in 0..=l_max {
        if m > 0 {
            let mf = m as f64;
            pmm *= -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * sin_theta;
        }
        out[off] = pmm;
        if m < l_max {
            let mf = m as f64;
            out[off + 1] = (2.0 * mf + 3.0).sqrt() * x * pmm;
            for l in (m + 2)..=l_max {
                let lf = l as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let lp = lf - 1.0;
                let a_prev = ((4.0 * lp * lp - 1.0) / (lp * lp - mf * mf)).sqrt();
                out[off + l - m] = a * (x * out[off + l - m - 1] - out[off + l - m - 2] / a_prev);
            }
        }
        off += l_max + 1 - m;
    }
}

/// Polar angle data `(cos θ, sin θ, φ)` of a point of `S²`.
pub fn polar_coords(x: [f64; 3]) -> (f64, f64, f64) {
    let rho = x[1].hypot(x[2]);
    let r = (x[0] * x[0] + rho * rho).sqrt();
    (x[0] / r, rho / r, x[2].atan2(x[1]))
}

/// All `Y_lm(x)` for `l ≤ l_max`, in [`lm_index`] order.
pub fn sph_harm_all(l_max: usize, x: [f64; 3]) -> Vec<Complex64> {
    let (ct, st, phi) = polar_coords(x);
    let mut table = vec![0.0; table_len(l_max)];
    normalized_legendre_into(l_max, ct, st, &mut table);
    let mut out = vec![Complex64::new(0.0, 0.0); lm_count(l_max)];
    let mut off = 0;
    for m in 0..=l_max {
        let e = Complex64::from_polar(1.0, m as f64 * phi);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        for l in m..=l_max {
            let p = table[off + l - m];
            out[lm_index(l, m as i64)] = e * p;
            if m > 0 {
                out[lm_index(l, -(m as i64))] = e.conj() * (sign * p);
            }
        }
        off += l_max + 1 - m;
    }
    out
}

/// A single `Y_lm(x)`.
pub fn sph_harm(l: usize, m: i64, x: [f64; 3]) -> Complex64 {
    assert!(m.unsigned_abs() as usize <= l, "|m| > l");
    sph_harm_all(l, x)[lm_index(l, m)]
}

/// Legendre polynomials `P_0(t), …, P_{l_max}(t)`.
pub fn legendre_p(l_max: usize, t: f64) -> Vec<f64> {
    gegenbauer_normalized(0.5, l_max, t)
}

/// Gegenbauer polynomials normalised to `G_l(1) = 1`, parameter `ν`.
///
/// For `ν = (n−2)/2` these are the zonal functions of degree `l` on
/// `S^{n−1}`; `ν = 1/2` gives Legendre.
pub fn gegenbauer_normalized(nu: f64, l_max: usize, t: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(l_max + 1);
    gegenbauer_normalized_into(nu, t, &mut g, l_max);
    g
}

pub(crate) fn gegenbauer_normalized_into(nu: f64, t: f64, g: &mut Vec<f64>, l_max: usize) {
    g.clear();
    g.push(1.0);
    if l_max == 0 {
        return;
    }
    g.push(t);
    for l in 1..l_max {
        let lf = l as f64;
        let next = (2.0 * (lf + nu) * t * g[l] - lf * g[l - 1]) / (lf + 2.0 * nu);
        g.push(next);
    }
}

/// Dimension of the space of degree-`l` harmonics on `S^{n−1}`.
pub fn harmonic_space_dim(n: usize, l: usize) -> f64 {
    if l == 0 {
        return 1.0;
    }
    // (2l+n−2)/(l+n−2) · C(l+n−2, l)
    let nf = n as f64;
    let lf = l as f64;
    let mut binom = 1.0;
    for j in 1..=l {
        binom *= (j as f64 + nf - 2.0) / j as f64;
    }
    (2.0 * lf + nf - 2.0) / (lf + nf - 2.0) * binom
}
