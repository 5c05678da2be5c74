//! Zonal integrals on `S^{n−1}` for any `n ≥ 3`.
//!
//! A function of `t = ⟨x, y⟩` integrates as
//! `|S^{n−2}| ∫_{−1}^{1} F(t) (1−t²)^{(n−3)/2} dt`, and a zonal kernel acts
//! on degree-`l` harmonics by the Funk–Hecke eigenvalue
//! `e_l = |S^{n−2}| ∫ F(t) G_l(t) (1−t²)^{(n−3)/2} dt`, `G_l(1) = 1`.

use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use super::harmonics::gegenbauer_normalized_into;
use super::quadrature::{gauss_jacobi_normalized, tanh_sinh_vec};
use crate::error::{Error, Result};
use crate::lorentz::Dimension;

const ZONAL_TOL: f64 = 1e-13;
const MIN_NODES: usize = 32;
const MAX_NODES: usize = 512;

/// `Γ(k/2)` for a positive integer `k`, exactly as a product.
pub fn gamma_half_integer(k: u32) -> f64 {
    assert!(k > 0, "Γ(0) is a pole");
    let (mut x, mut g) = if k % 2 == 0 { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    while (2.0 * x) as u32 != k {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area `|S^{d−1}| = 2π^{d/2}/Γ(d/2)` of the unit sphere in `ℝ^d`.
pub fn sphere_area(d: usize) -> f64 {
    assert!(d >= 1);
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half_integer(d as u32)
}

/// Total mass of `(1−t²)^{(n−3)/2}` on `[−1, 1]`.
fn jacobi_mass(n: usize) -> f64 {
    PI.sqrt() * gamma_half_integer(n as u32 - 1) / gamma_half_integer(n as u32)
}

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

fn jacobi_rule(n: usize, nodes: usize) -> Result<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache").get(&(n, nodes)) {
        return Ok(r.clone());
    }
    let a = (n as f64 - 3.0) / 2.0;
    let (x, w) = gauss_jacobi_normalized(nodes, a, a)?;
    let mass = sphere_area(n - 1) * jacobi_mass(n);
    let rule: Rule = Arc::new((x, w.into_iter().map(|v| v * mass).collect()));
    cache.lock().expect("rule cache").insert((n, nodes), rule.clone());
    Ok(rule)
}

fn check(v: Complex64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("zonal profile"))
    }
}

fn jacobi_sum<F: Fn(f64) -> Complex64>(rule: &Rule, f: &F) -> Result<Complex64> {
    let mut s = Complex64::new(0.0, 0.0);
    for (t, w) in rule.0.iter().zip(&rule.1) {
        s += check(f(*t))? * w;
    }
    Ok(s)
}

/// `∫_{S^{n−1}} F(⟨x, 𝟏⟩) dσ(x)` for a smooth profile, by Gauss–Jacobi with
/// node doubling until two rules agree.
pub fn zonal_integral<F: Fn(f64) -> Complex64>(dim: Dimension, f: F) -> Result<Complex64> {
    let mut nodes = MIN_NODES;
    let mut prev = jacobi_sum(&jacobi_rule(dim.n(), nodes)?, &f)?;
    while nodes < MAX_NODES {
        nodes *= 2;
        let next = jacobi_sum(&jacobi_rule(dim.n(), nodes)?, &f)?;
        if (next - prev).norm() <= ZONAL_TOL * next.norm().max(1e-300) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "Gauss-Jacobi did not settle at {MAX_NODES} nodes; use zonal_integral_singular for non-smooth profiles"
    )))
}

/// Like [`zonal_integral`] for profiles with endpoint singularities:
/// `f(t, 1−t, 1+t)` on a tanh–sinh rule.
pub fn zonal_integral_singular<F>(dim: Dimension, f: F) -> Result<Complex64>
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    Ok(funk_hecke_singular(dim, 0, f)?[0])
}

/// Funk–Hecke eigenvalue of degree `l` for a smooth profile.
pub fn funk_hecke<F: Fn(f64) -> Complex64>(dim: Dimension, f: F, l: usize) -> Result<Complex64> {
    let nu = (dim.n() as f64 - 2.0) / 2.0;
    let gl = |t: f64| {
        let mut g = Vec::with_capacity(l + 1);
        gegenbauer_normalized_into(nu, t, &mut g, l);
        g[l]
    };
    let mut nodes = MIN_NODES.max(l + 2).next_power_of_two();
    let mut prev = jacobi_sum(&jacobi_rule(dim.n(), nodes)?, &|t| f(t) * gl(t))?;
    let scale = jacobi_sum(&jacobi_rule(dim.n(), nodes)?, &|t| Complex64::new(f(t).norm(), 0.0))?.re;
    while nodes < MAX_NODES.max(2 * l + 64) {
        nodes *= 2;
        let next = jacobi_sum(&jacobi_rule(dim.n(), nodes)?, &|t| f(t) * gl(t))?;
        let err = (next - prev).norm();
        if err <= ZONAL_TOL * next.norm() || err <= 64.0 * f64::EPSILON * scale {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!("Funk-Hecke degree {l} did not settle")))
}

/// Funk–Hecke eigenvalues `e_0, …, e_{l_max}` of a profile with possible
/// endpoint singularities, all from one tanh–sinh rule.
pub fn funk_hecke_singular<F>(dim: Dimension, l_max: usize, f: F) -> Result<Vec<Complex64>>
where
    F: Fn(f64, f64, f64) -> Complex64,
{
    let n = dim.n();
    let nu = (n as f64 - 2.0) / 2.0;
    let a = (n as f64 - 3.0) / 2.0;
    let area = sphere_area(n - 1);
    let mut g = Vec::with_capacity(l_max + 1);
    let r = tanh_sinh_vec(
        l_max + 1,
        |t, om, op, out| {
            let weight = if n == 3 { 1.0 } else { (om * op).powf(a) };
            let v = f(t, om, op) * weight;
            gegenbauer_normalized_into(nu, t, &mut g, l_max);
            for (o, gl) in out.iter_mut().zip(&g) {
                *o = v * gl;
            }
        },
        1e-14,
    )?;
    Ok(r.values.into_iter().map(|v| v * area).collect())
}

/// Profile of the Riesz kernel `|x−y|^s = (2−2t)^{s/2}`, evaluated from `1−t`.
#[inline]
pub fn riesz_profile(s: Complex64, one_minus_t: f64) -> Complex64 {
    ((s * 0.5) * (2.0 * one_minus_t).ln()).exp()
}

/// Funk–Hecke eigenvalues of `|x−y|^s` for `l ≤ l_max` by direct quadrature.
/// Requires `Re s > −(n−1)` for the integral to converge.
pub fn riesz_eigenvalues_direct(dim: Dimension, s: Complex64, l_max: usize) -> Result<Vec<Complex64>> {
    if s.re <= -(dim.n() as f64 - 1.0) {
        return Err(Error::OutsideConvergence(format!(
            "|x-y|^s is not integrable for Re s = {} <= -(n-1)",
            s.re
        )));
    }
    let n = dim.n();
    let nu = (n as f64 - 2.0) / 2.0;
    let a = (n as f64 - 3.0) / 2.0;
    let mut g = Vec::with_capacity(l_max + 1);
    // profile and weight share one exponential so neither over- nor underflows alone
    let r = tanh_sinh_vec(
        l_max + 1,
        |t, om, op, out| {
            let log = (s * 0.5) * (2.0 * om).ln() + a * (om * op).ln();
            let v = log.exp();
            gegenbauer_normalized_into(nu, t, &mut g, l_max);
            for (o, gl) in out.iter_mut().zip(&g) {
                *o = v * gl;
            }
        },
        1e-14,
    )?;
    let area = sphere_area(n - 1);
    Ok(r.values.into_iter().map(|v| v * area).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((gamma_half_integer(7) - 15.0 * PI.sqrt() / 8.0).abs() < 1e-14);
        assert_eq!(gamma_half_integer(6), 2.0);
    }

    #[test]
    fn zonal_examples() {
        let d3 = Dimension::three();
        let d4 = Dimension::new(4).unwrap();
        assert!((zonal_integral(d3, |_| c(1.0)).unwrap().re - 4.0 * PI).abs() < 1e-12);
        let v = zonal_integral(d3, |t| c(2.0 - 2.0 * t)).unwrap();
        assert!((v.re - 8.0 * PI).abs() < 1e-12);
        let v = zonal_integral(d4, |_| c(1.0)).unwrap();
        assert!((v.re - 2.0 * PI * PI).abs() < 1e-12);
        assert!(zonal_integral(d3, |_| c(f64::NAN)).is_err());
    }

    #[test]
    fn zonal_singular_detects_nonconvergence() {
        // a strongly singular profile does not settle on Gauss–Jacobi
        let d3 = Dimension::three();
        assert!(zonal_integral(d3, |t| c((1.0 - t).max(1e-300).powf(-0.9))).is_err());
        let v = zonal_integral_singular(d3, |_, om, _| c(om.powf(-0.9))).unwrap();
        // 2π ∫ (1−t)^{−0.9} dt = 2π · 2^{0.1}/0.1
        assert!((v.re - 2.0 * PI * 2f64.powf(0.1) / 0.1).abs() < 1e-10 * v.re);
    }

    #[test]
    fn funk_hecke_orthogonality() {
        let d5 = Dimension::new(5).unwrap();
        for l in 1..6 {
            assert!(funk_hecke(d5, |_| c(1.0), l).unwrap().norm() < 1e-13);
        }
        // F(t) = t on S²: e₁ = 2π ∫ t² = 4π/3
        let e1 = funk_hecke(Dimension::three(), |t| c(t), 1).unwrap();
        assert!((e1.re - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn riesz_l0_matches_closed_form() {
        let d3 = Dimension::three();
        for s in [c(2.0), c(0.5), Complex64::new(-1.2, 0.7)] {
            let e = riesz_eigenvalues_direct(d3, s, 3).unwrap();
            // 2^{s+3}π/(s+2)
            let exact = ((s + 3.0) * 2f64.ln()).exp() * PI / (s + 2.0);
            assert!((e[0] - exact).norm() < 1e-12 * exact.norm(), "{s}");
        }
        assert!(riesz_eigenvalues_direct(d3, c(-2.0), 2).is_err());
    }

    #[test]
    fn riesz_matches_gauss_jacobi_for_polynomial_profile() {
        // s = 4: (2−2t)² is a polynomial, both rules are exact
        let d4 = Dimension::new(4).unwrap();
        let e = riesz_eigenvalues_direct(d4, c(4.0), 3).unwrap();
        for l in 0..=3 {
            let g = funk_hecke(d4, |t| c((2.0 - 2.0 * t).powi(2)), l).unwrap();
            assert!((e[l] - g).norm() < 1e-12 * (1.0 + g.norm()), "l={l}");
        }
    }
}
