//! Closed forms for `𝒦_𝛂(1,1,1)` and its residue along `α₃ = −ρ−2k`.
//!
//! The Gamma ratio is the shape known up to a constant factor. For `n = 3`
//! the exact value with the kernel `|x−y|^{−ρ+α}` is
//! `8π³ · 2^{α₁+α₂+α₃} · ratio`, see [`k111_exact_n3`].

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lorentz::Dimension;
use crate::spectral_ops::{knapp_stein_multipliers, DIRECT_MARGIN};
use crate::special::{gamma, rgamma};

/// `Γ((Σα+ρ)/2) Γ((α₁+ρ)/2) Γ((α₂+ρ)/2) Γ((α₃+ρ)/2)`
/// `/ [Γ(ρ+(α₂+α₃)/2) Γ(ρ+(α₃+α₁)/2) Γ(ρ+(α₁+α₂)/2)]`.
pub fn k111_gamma_ratio(dim: Dimension, alpha: [Complex64; 3]) -> Complex64 {
    let rho = dim.rho();
    let [a1, a2, a3] = alpha;
    let num = gamma((a1 + a2 + a3 + rho) * 0.5)
        * gamma((a1 + rho) * 0.5)
        * gamma((a2 + rho) * 0.5)
        * gamma((a3 + rho) * 0.5);
    let inv_den = rgamma(rho + (a2 + a3) * 0.5) * rgamma(rho + (a3 + a1) * 0.5) * rgamma(rho + (a1 + a2) * 0.5);
    num * inv_den
}

/// Exact `𝒦_𝛂(1,1,1)` on `S²`.
pub fn k111_exact_n3(alpha: [Complex64; 3]) -> Complex64 {
    let sum: Complex64 = alpha.iter().sum();
    8.0 * PI.powi(3) * (sum * std::f64::consts::LN_2).exp() * k111_gamma_ratio(Dimension::three(), alpha)
}

/// `Σ_{l≤l_max} (2l+1) e_l(α₁) e_l(α₂) e_l(α₃)` with the Knapp–Stein
/// eigenvalues `e_l`; converges to `𝒦_𝛂(1,1,1)` when `Re Σα > −ρ`.
pub fn k111_series_n3(alpha: [Complex64; 3], l_max: usize) -> Result<Complex64> {
    let dim = Dimension::three();
    let sum: Complex64 = alpha.iter().sum();
    if sum.re <= -dim.rho() {
        return Err(Error::OutsideConvergence(format!("series diverges for Re(α₁+α₂+α₃) = {} <= -ρ", sum.re)));
    }
    let e: Vec<Vec<Complex64>> = alpha
        .iter()
        .map(|&a| knapp_stein_multipliers(dim, a, l_max, DIRECT_MARGIN))
        .collect::<Result<_>>()?;
    let mut acc = Complex64::new(0.0, 0.0);
    for l in (0..=l_max).rev() {
        acc += (2 * l + 1) as f64 * e[0][l] * e[1][l] * e[2][l];
    }
    Ok(acc)
}

/// `(z−1)(z−2)⋯(z−k)`.
fn falling(z: Complex64, k: usize) -> Complex64 {
    (1..=k).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z - j as f64))
}

/// Residue of the Gamma ratio in the variable `(α₃+ρ)/2` at `α₃ = −ρ−2k`:
/// `(−1)^k/k! ∏_{j=1}^k ((ρ+α₁)/2−j)((ρ+α₂)/2−j) · Γ((α₁+α₂)/2−k)/Γ(ρ+(α₁+α₂)/2)`.
pub fn k111_residue_expression(dim: Dimension, k: usize, alpha1: Complex64, alpha2: Complex64) -> Complex64 {
    let rho = dim.rho();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    let poly = falling((alpha1 + rho) * 0.5, k) * falling((alpha2 + rho) * 0.5, k);
    let u = alpha1 + alpha2;
    sign / fact * poly * gamma(u * 0.5 - k as f64) * rgamma(rho + u * 0.5)
}

/// The same residue in the Gamma-quotient form, before simplification.
pub fn k111_residue_expression_gamma_form(dim: Dimension, k: usize, alpha1: Complex64, alpha2: Complex64) -> Complex64 {
    let rho = dim.rho();
    let kf = k as f64;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let fact: f64 = (1..=k).map(|j| j as f64).product();
    let u = alpha1 + alpha2;
    sign / fact
        * gamma(u * 0.5 - kf)
        * gamma((alpha1 + rho) * 0.5)
        * gamma((alpha2 + rho) * 0.5)
        * rgamma((rho + alpha2) * 0.5 - kf)
        * rgamma((rho + alpha1) * 0.5 - kf)
        * rgamma(rho + u * 0.5)
}

/// Residue in `α₃` of [`k111_exact_n3`] at `α₃ = −ρ−2k`.
pub fn k111_exact_residue_n3(k: usize, alpha1: Complex64, alpha2: Complex64) -> Complex64 {
    let dim = Dimension::three();
    let a3 = -dim.rho() - 2.0 * k as f64;
    let sum = alpha1 + alpha2 + a3;
    // dα₃ = 2 d((α₃+ρ)/2)
    16.0 * PI.powi(3) * (sum * std::f64::consts::LN_2).exp() * k111_residue_expression(dim, k, alpha1, alpha2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mero::residue_ring;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn exact_matches_series() {
        for a in [[2.0, 1.5, 0.7], [0.3, 0.4, 0.9], [3.1, -0.4, 1.2]] {
            let alpha = a.map(c);
            let exact = k111_exact_n3(alpha);
            let series = k111_series_n3(alpha, 400).unwrap();
            assert!(((series - exact) / exact).norm() < 1e-6, "{a:?}: {series} vs {exact}");
        }
    }

    #[test]
    fn residue_forms_agree() {
        let d = Dimension::new(4).unwrap();
        for k in 0..3 {
            let (a1, a2) = (Complex64::new(0.37, 0.2), Complex64::new(1.71, -0.1));
            let p = k111_residue_expression(d, k, a1, a2);
            let q = k111_residue_expression_gamma_form(d, k, a1, a2);
            assert!(((p - q) / q).norm() < 1e-12);
        }
    }

    #[test]
    fn residue_expression_is_half_parameter_residue() {
        let d = Dimension::three();
        let (a1, a2) = (c(1.3), c(0.45));
        for k in 0..3 {
            let center = c(-d.rho() - 2.0 * k as f64);
            let fit = residue_ring(|a3| Ok(k111_gamma_ratio(d, [a1, a2, a3])), center, 0.1, 32).unwrap();
            let expr = k111_residue_expression(d, k, a1, a2);
            assert!(((fit.residue - 2.0 * expr) / expr).norm() < 1e-10);
            let exact = residue_ring(|a3| Ok(k111_exact_n3([a1, a2, a3])), center, 0.1, 32).unwrap();
            let want = k111_exact_residue_n3(k, a1, a2);
            assert!(((exact.residue - want) / want).norm() < 1e-10);
        }
    }
}
