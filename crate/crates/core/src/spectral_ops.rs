//! Spectral multipliers on `S^{n−1}`: the Laplacian, the GJMS-type
//! operators `Δ_k`, the Bernstein operator and the Knapp–Stein operators
//! `K_α f = |x−y|^{−ρ+α} ⋆ f`, with continuation below the convergence
//! region by the Bernstein–Sato descent
//! `e_l(s−2) = [−l(l+n−2) + (s/2)(s/2+n−2)] / [s(s+n−3)] · e_l(s)`.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lorentz::Dimension;
use crate::sphgrid::zonal::{gamma_half_integer, riesz_eigenvalues_direct};
use crate::sphgrid::HarmonicCoeffs;

/// Default distance above `Re s = −(n−1)` required for direct quadrature.
pub const DIRECT_MARGIN: f64 = 0.5;
/// Distance to a pole or a descent denominator zero treated as singular.
pub const POLE_GUARD: f64 = 1e-6;

/// `−l(l+n−2)`.
pub fn laplacian_multiplier(dim: Dimension, l: usize) -> f64 {
    let l = l as f64;
    -l * (l + dim.n() as f64 - 2.0)
}

/// Eigenvalue of `Δ_k = Π_{j=1}^k (Δ − (ρ+j−1)(ρ−j))` on degree `l`.
pub fn gjms_multiplier(dim: Dimension, k: usize, l: usize) -> f64 {
    let rho = dim.rho();
    let lap = laplacian_multiplier(dim, l);
    (1..=k)
        .map(|j| {
            let j = j as f64;
            lap - (rho + j - 1.0) * (rho - j)
        })
        .product()
}

/// `c_k = π^ρ / (4^k Γ(ρ+k) Γ(k+1))`, so that `R_k = c_k Δ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GjmsConstant {
    pub k: usize,
    pub c_k: f64,
}

pub fn gjms_constant(dim: Dimension, k: usize) -> GjmsConstant {
    let n = dim.n();
    // Γ(ρ+k) = Γ((n−1+2k)/2)
    let g_rho_k = gamma_half_integer((n - 1 + 2 * k) as u32);
    let k_fact: f64 = (1..=k).map(|j| j as f64).product();
    let c_k = PI.powf(dim.rho()) / (4f64.powi(k as i32) * g_rho_k * k_fact);
    GjmsConstant { k, c_k }
}

/// `−l(l+n−2) + (s/2)(s/2+n−2)`, the Bernstein operator on degree `l`.
pub fn bernstein_multiplier(dim: Dimension, s: Complex64, l: usize) -> Complex64 {
    let h = s * 0.5;
    h * (h + (dim.n() as f64 - 2.0)) + laplacian_multiplier(dim, l)
}

/// `[Δ + (s/2)(s/2+n−2)] f`.
pub fn bernstein_apply(dim: Dimension, s: Complex64, f: &HarmonicCoeffs) -> Result<HarmonicCoeffs> {
    let values: Vec<Complex64> = (0..=f.l_max()).map(|l| bernstein_multiplier(dim, s, l)).collect();
    MultiplierFamily::from_values(dim, MultiplierKind::Bernstein, s, values)?.apply(f)
}

/// What a [`MultiplierFamily`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierKind {
    Identity,
    Laplacian,
    Gjms(usize),
    ResidueOperator(usize),
    Bernstein,
    KnappStein,
}

/// Degree-wise eigenvalues of a zonal operator, `values[l]` for `l ≤ L`.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplierFamily {
    pub dim: Dimension,
    pub l_max: usize,
    pub values: Vec<Complex64>,
    pub param: Complex64,
    pub kind: MultiplierKind,
}

impl MultiplierFamily {
    pub fn from_values(
        dim: Dimension,
        kind: MultiplierKind,
        param: Complex64,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty multiplier family".into()));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("multiplier values"));
        }
        Ok(MultiplierFamily { dim, l_max: values.len() - 1, values, param, kind })
    }

    fn real(dim: Dimension, kind: MultiplierKind, l_max: usize, f: impl Fn(usize) -> f64) -> Self {
        let values = (0..=l_max).map(|l| Complex64::new(f(l), 0.0)).collect();
        MultiplierFamily { dim, l_max, values, param: Complex64::new(0.0, 0.0), kind }
    }

    pub fn identity(dim: Dimension, l_max: usize) -> Self {
        Self::real(dim, MultiplierKind::Identity, l_max, |_| 1.0)
    }

    pub fn laplacian(dim: Dimension, l_max: usize) -> Self {
        Self::real(dim, MultiplierKind::Laplacian, l_max, |l| laplacian_multiplier(dim, l))
    }

    pub fn gjms(dim: Dimension, k: usize, l_max: usize) -> Self {
        let mut f = Self::real(dim, MultiplierKind::Gjms(k), l_max, |l| gjms_multiplier(dim, k, l));
        f.param = Complex64::new(k as f64, 0.0);
        f
    }

    /// `R_k = c_k Δ_k`.
    pub fn residue_operator(dim: Dimension, k: usize, l_max: usize) -> Self {
        let c = gjms_constant(dim, k).c_k;
        let mut f = Self::real(dim, MultiplierKind::ResidueOperator(k), l_max, |l| c * gjms_multiplier(dim, k, l));
        f.param = Complex64::new(k as f64, 0.0);
        f
    }

    pub fn knapp_stein(dim: Dimension, alpha: Complex64, l_max: usize, margin: f64) -> Result<Self> {
        let values = knapp_stein_multipliers(dim, alpha, l_max, margin)?;
        Self::from_values(dim, MultiplierKind::KnappStein, alpha, values)
    }

    pub fn value(&self, l: usize) -> Complex64 {
        self.values[l]
    }

    /// `c'_lm = values[l] · c_lm`. Only meaningful on `S²`.
    pub fn apply(&self, c: &HarmonicCoeffs) -> Result<HarmonicCoeffs> {
        self.dim.require(3)?;
        if c.l_max() > self.l_max {
            return Err(Error::InvalidDegree(format!(
                "coefficients of degree {} exceed multiplier range {}",
                c.l_max(),
                self.l_max
            )));
        }
        c.apply_degree_multiplier(&self.values)
    }
}

/// `R_k f = c_k Δ_k f`.
pub fn residue_operator_apply(dim: Dimension, k: usize, f: &HarmonicCoeffs) -> Result<HarmonicCoeffs> {
    MultiplierFamily::residue_operator(dim, k, f.l_max()).apply(f)
}

/// Poles of `s ↦ |x−y|^s` are at `s = −(n−1) − 2k`; returns the nearest one
/// and its distance when closer than [`POLE_GUARD`].
pub fn near_riesz_pole(dim: Dimension, s: Complex64) -> Option<(f64, f64)> {
    let n1 = dim.n() as f64 - 1.0;
    if s.re > -n1 + 1.0 {
        return None;
    }
    let k = ((-n1 - s.re) / 2.0).round().max(0.0);
    let pole = -n1 - 2.0 * k;
    let d = (s - pole).norm();
    (d < POLE_GUARD).then_some((pole, d))
}

/// Descent steps needed to bring `Re(s + 2m)` above `−(n−1) + margin`.
pub fn descent_steps(dim: Dimension, s: Complex64, margin: f64) -> usize {
    let floor = -(dim.n() as f64 - 1.0) + margin;
    if s.re > floor {
        0
    } else {
        ((floor - s.re) / 2.0).floor() as usize + 1
    }
}

/// Funk–Hecke eigenvalues of `|x−y|^s`, `l ≤ l_max`: direct quadrature when
/// `Re s > −(n−1) + margin`, Bernstein descent otherwise.
pub fn riesz_multipliers(dim: Dimension, s: Complex64, l_max: usize, margin: f64) -> Result<Vec<Complex64>> {
    if let Some((pole, distance)) = near_riesz_pole(dim, s) {
        return Err(Error::NearPole { s, pole, distance });
    }
    match descent_steps(dim, s, margin) {
        0 => riesz_eigenvalues_direct(dim, s, l_max),
        m => riesz_multipliers_descent(dim, s, l_max, m),
    }
}

/// Eigenvalues at `s` obtained from direct quadrature at `s + 2·steps`
/// followed by `steps` descent steps.
pub fn riesz_multipliers_descent(dim: Dimension, s: Complex64, l_max: usize, steps: usize) -> Result<Vec<Complex64>> {
    let top = s + 2.0 * steps as f64;
    let mut e = riesz_eigenvalues_direct(dim, top, l_max)?;
    let shift = dim.n() as f64 - 3.0;
    for j in (1..=steps).rev() {
        let sigma = s + 2.0 * j as f64;
        if sigma.norm() < POLE_GUARD || (sigma + shift).norm() < POLE_GUARD {
            return Err(Error::DescentDenominator { s });
        }
        let denom = sigma * (sigma + shift);
        for (l, v) in e.iter_mut().enumerate() {
            *v *= bernstein_multiplier(dim, sigma, l) / denom;
        }
    }
    Ok(e)
}

/// `e_l(α)` for all `l ≤ l_max`, the eigenvalues of `K_α`, `s = −ρ + α`.
pub fn knapp_stein_multipliers(dim: Dimension, alpha: Complex64, l_max: usize, margin: f64) -> Result<Vec<Complex64>> {
    riesz_multipliers(dim, alpha - dim.rho(), l_max, margin)
}

/// A single Knapp–Stein eigenvalue.
pub fn knapp_stein_multiplier(dim: Dimension, alpha: Complex64, l: usize, margin: f64) -> Result<Complex64> {
    Ok(knapp_stein_multipliers(dim, alpha, l, margin)?[l])
}

/// Knapp–Stein eigenvalues forced through direct quadrature.
pub fn knapp_stein_direct(dim: Dimension, alpha: Complex64, l_max: usize) -> Result<Vec<Complex64>> {
    riesz_eigenvalues_direct(dim, alpha - dim.rho(), l_max)
}

/// Knapp–Stein eigenvalues forced through `steps` descent steps.
pub fn knapp_stein_descent(dim: Dimension, alpha: Complex64, l_max: usize, steps: usize) -> Result<Vec<Complex64>> {
    riesz_multipliers_descent(dim, alpha - dim.rho(), l_max, steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn laplacian_values() {
        assert_eq!(laplacian_multiplier(d(3), 0), 0.0);
        assert_eq!(laplacian_multiplier(d(3), 1), -2.0);
        assert_eq!(laplacian_multiplier(d(5), 2), -10.0);
    }

    #[test]
    fn gjms_factorisations() {
        for n in 3..8 {
            let dim = d(n);
            let rho = dim.rho();
            let yam = |l| laplacian_multiplier(dim, l) - 0.25 * (n as f64 - 1.0) * (n as f64 - 3.0);
            for l in 0..20 {
                assert_eq!(gjms_multiplier(dim, 0, l), 1.0);
                assert!((gjms_multiplier(dim, 1, l) - yam(l)).abs() < 1e-12);
                for k in 1..=4 {
                    let alt: f64 = (1..=k).map(|j| yam(l) + (j * (j - 1)) as f64).product();
                    let lin: f64 = (1..=k)
                        .map(|j| {
                            let (lf, jf) = (l as f64, j as f64);
                            -(lf + rho + jf - 1.0) * (lf + rho - jf)
                        })
                        .product();
                    let v = gjms_multiplier(dim, k, l);
                    assert!((v - alt).abs() <= 1e-10 * v.abs().max(1.0));
                    assert!((v - lin).abs() <= 1e-10 * v.abs().max(1.0));
                }
            }
        }
        // n = 3: Δ_k kills degrees below k
        for k in 1..5 {
            for l in 0..k {
                assert_eq!(gjms_multiplier(d(3), k, l), 0.0);
            }
            assert!(gjms_multiplier(d(3), k, k) != 0.0);
        }
    }

    #[test]
    fn gjms_constants() {
        assert!((gjms_constant(d(3), 0).c_k - PI).abs() < 1e-15);
        assert!((gjms_constant(d(3), 1).c_k - PI / 4.0).abs() < 1e-15);
        assert!((gjms_constant(d(3), 2).c_k - PI / 64.0).abs() < 1e-16);
        // recursion c_{k+1} = c_k / (4(ρ+k)(k+1))
        for n in [3, 4, 5, 6] {
            let dim = d(n);
            for k in 0..5 {
                let a = gjms_constant(dim, k).c_k;
                let b = gjms_constant(dim, k + 1).c_k;
                let r = a / (4.0 * (dim.rho() + k as f64) * (k as f64 + 1.0));
                assert!((b - r).abs() < 1e-14 * b);
            }
        }
    }

    #[test]
    fn bernstein_examples() {
        let dim = d(3);
        let s2 = Complex64::new(2.0, 0.0);
        assert_eq!(bernstein_multiplier(dim, s2, 0), Complex64::new(2.0, 0.0));
        assert_eq!(bernstein_multiplier(dim, s2, 1), Complex64::new(0.0, 0.0));
        assert_eq!(bernstein_multiplier(dim, Complex64::new(0.0, 0.0), 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn laplacian_on_y10() {
        let f = HarmonicCoeffs::single(1, 1, 0);
        let g = MultiplierFamily::laplacian(d(3), 1).apply(&f).unwrap();
        assert_eq!(g.get(1, 0), Complex64::new(-2.0, 0.0));
        let r = residue_operator_apply(d(3), 1, &f).unwrap();
        assert!((r.get(1, 0) - Complex64::new(-PI / 2.0, 0.0)).norm() < 1e-15);
        assert!(MultiplierFamily::laplacian(d(4), 1).apply(&f).is_err());
    }

    #[test]
    fn knapp_stein_l0() {
        let dim = d(3);
        for alpha in [Complex64::new(0.5, 0.0), Complex64::new(-0.3, 0.4), Complex64::new(2.0, -1.0)] {
            let e0 = knapp_stein_multiplier(dim, alpha, 0, DIRECT_MARGIN).unwrap();
            let exact = ((alpha + 2.0) * 2f64.ln()).exp() * PI / (alpha + 1.0);
            assert!((e0 - exact).norm() < 1e-12 * exact.norm());
        }
    }

    #[test]
    fn descent_agrees_with_direct() {
        for n in [3, 4, 5] {
            let dim = d(n);
            let s = Complex64::new(-(n as f64 - 1.0) + 1.3, 0.2);
            let a = riesz_eigenvalues_direct(dim, s, 24).unwrap();
            for steps in 1..3 {
                let b = riesz_multipliers_descent(dim, s, 24, steps).unwrap();
                for l in 0..=24 {
                    assert!((a[l] - b[l]).norm() <= 1e-9 * a[l].norm(), "n={n} l={l}");
                }
            }
        }
    }

    #[test]
    fn pole_guards() {
        let dim = d(3);
        assert!(matches!(
            riesz_multipliers(dim, Complex64::new(-4.0, 1e-8), 3, DIRECT_MARGIN),
            Err(Error::NearPole { .. })
        ));
        // n = 4: one forced step from s = −2 crosses σ = 0
        assert!(matches!(
            riesz_multipliers_descent(d(4), Complex64::new(-2.0, 0.0), 3, 1),
            Err(Error::DescentDenominator { .. })
        ));
        assert!(riesz_multipliers_descent(d(4), Complex64::new(-2.0, 1e-3), 3, 1).is_ok());
        assert_eq!(descent_steps(dim, Complex64::new(-3.2, 0.0), 0.5), 1);
        assert_eq!(descent_steps(dim, Complex64::new(-3.6, 0.0), 0.5), 2);
    }
}
