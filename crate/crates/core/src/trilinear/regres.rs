//! Residues of `α₃ ↦ 𝒦_𝛂(f₁,f₂,f₃)` on the planes `α₃ = −ρ−2k` against
//! `c_k 𝒯_k(f₁,f₂,f₃)`.
//!
//! The ring around `α₃ = −ρ−2k` leaves the region where the triple integral
//! converges, so `𝒦` is continued in `α₃` alone: with
//! `Φ(x₁,x₂) = f₁(x₁) f₂(x₂) F₃(x₁,x₂)` and
//! `F₃(x₁,x₂) = ∫ f₃(x₃) |x₂−x₃|^{s₁} |x₃−x₁|^{s₂} dσ(x₃)` on the grid,
//! `𝒦 = Σ_l e_l(α₃) D_l(Φ)` with the continued Knapp–Stein eigenvalues.

use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

use super::closed_form::k111_residue_expression;
use super::kform::{check_region, inner_pair_matrix, log_distances, DiagonalRule, CONVERGENCE_MARGIN};
use super::params::ParameterTriple;
use super::tform::{check_direct_regime, t_form_fn, TFormOptions, TFormValue};
use crate::error::Result;
use crate::lorentz::Dimension;
use crate::mero::{knapp_stein_pole, residue_ring, LaurentFit, TwoPointSpectrum};
use crate::reps::SphereFunction;
use crate::spectral_ops::{gjms_constant, knapp_stein_multipliers, DIRECT_MARGIN};
use crate::sphgrid::Grid;

pub const REGRES_RING_RADIUS: f64 = 0.15;
pub const REGRES_RING_SIZE: usize = 16;

/// `α₃ ↦ 𝒦_{(α₁,α₂,α₃)}(f₁,f₂,f₃)` for fixed `(α₁, α₂)`, continued in `α₃`.
#[derive(Clone, Debug)]
pub struct Alpha3Continuation {
    dim: Dimension,
    spectrum: TwoPointSpectrum,
}

impl Alpha3Continuation {
    pub fn new(dim: Dimension, alpha1: Complex64, alpha2: Complex64, f: [&dyn SphereFunction; 3], grid: &Arc<Grid>) -> Result<Self> {
        // α₃ is irrelevant for F₃; a large value keeps the region check about (α₁, α₂)
        let probe = ParameterTriple::from_alpha([alpha1, alpha2, Complex64::new(10.0, 0.0)]);
        check_region(dim, &probe, CONVERGENCE_MARGIN)?;
        let f1 = f[0].sample(grid);
        let f2 = f[1].sample(grid);
        let f3 = f[2].sample(grid);
        let logd = log_distances(&grid.points());
        let m = inner_pair_matrix(dim, &probe, &f3, &logd, DiagonalRule::Corrected);
        drop(logd);
        let n = grid.len();
        let mut phi = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                phi[i * n + j] = f1.values()[i] * f2.values()[j] * m.get(i, j);
            }
        }
        let spectrum = TwoPointSpectrum::from_samples(grid, &phi)?;
        Ok(Alpha3Continuation { dim, spectrum })
    }

    pub fn value(&self, alpha3: Complex64) -> Result<Complex64> {
        let e = knapp_stein_multipliers(self.dim, alpha3, self.spectrum.values.len() - 1, DIRECT_MARGIN)?;
        Ok(self.spectrum.contract(&e))
    }

    pub fn residue(&self, k: usize, radius: f64, ring_size: usize) -> Result<LaurentFit> {
        let center = Complex64::new(knapp_stein_pole(self.dim, k), 0.0);
        residue_ring(|a3| self.value(a3), center, radius, ring_size)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RegresReport {
    pub k: usize,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub residue: LaurentFit,
    pub t_form: TFormValue,
    pub c_k: f64,
    /// `|Res − c_k 𝒯_k| / |c_k 𝒯_k|`.
    pub defect: f64,
    /// The same with the residue taken in `(α₃+ρ)/2`, i.e. `Res/2`.
    pub half_parameter_defect: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RegresOptions {
    pub ring_radius: f64,
    pub ring_size: usize,
    pub t_form: TFormOptions,
}

impl Default for RegresOptions {
    fn default() -> Self {
        RegresOptions { ring_radius: REGRES_RING_RADIUS, ring_size: REGRES_RING_SIZE, t_form: TFormOptions::default() }
    }
}

/// Ring residue of `𝒦` at `α₃ = −ρ−2k` against `c_k 𝒯_k`, both on `grid`.
#[allow(clippy::too_many_arguments)]
pub fn regres_defect(
    dim: Dimension,
    k: usize,
    alpha1: Complex64,
    alpha2: Complex64,
    f: [&dyn SphereFunction; 3],
    grid: &Arc<Grid>,
    opts: &RegresOptions,
) -> Result<RegresReport> {
    check_direct_regime(dim, k, alpha1, alpha2, opts.t_form.margin)?;
    let cont = Alpha3Continuation::new(dim, alpha1, alpha2, f, grid)?;
    let residue = cont.residue(k, opts.ring_radius, opts.ring_size)?;
    let t = t_form_fn(dim, k, alpha1, alpha2, f, grid, &opts.t_form)?;
    let c_k = gjms_constant(dim, k).c_k;
    let target = t.value * c_k;
    Ok(RegresReport {
        k,
        alpha1,
        alpha2,
        residue,
        t_form: t,
        c_k,
        defect: (residue.residue - target).norm() / target.norm(),
        half_parameter_defect: (residue.residue * 0.5 - target).norm() / target.norm(),
    })
}

/// Closed-form channel for `f₁ = f₂ = f₃ = 1`: ratios between two points
/// `(α₁, α₂)` of `c_k 𝒯_k(1,1,1)`, of the ring residue of `𝒦(1,1,1)`, and
/// of the residue expression of the Gamma ratio.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormRatioReport {
    pub points: [[Complex64; 2]; 2],
    pub t_ratio: Complex64,
    pub residue_ratio: Complex64,
    pub expression_ratio: Complex64,
    /// `|t_ratio / expression_ratio − 1|`.
    pub defect: f64,
    /// The same after multiplying the expression by `2^{α₁+α₂}`.
    pub normalized_defect: f64,
    /// `|residue_ratio / t_ratio − 1|`.
    pub residue_vs_t: f64,
}

pub fn closed_form_ratio_check(
    dim: Dimension,
    k: usize,
    points: [[Complex64; 2]; 2],
    grid: &Arc<Grid>,
    opts: &RegresOptions,
) -> Result<ClosedFormRatioReport> {
    let one = crate::sphgrid::HarmonicCoeffs::constant(0, Complex64::new(1.0, 0.0));
    let f: [&dyn SphereFunction; 3] = [&one, &one, &one];
    let mut t = [Complex64::new(0.0, 0.0); 2];
    let mut r = [Complex64::new(0.0, 0.0); 2];
    let mut e = [Complex64::new(0.0, 0.0); 2];
    let mut norm = [Complex64::new(0.0, 0.0); 2];
    for (i, [a1, a2]) in points.iter().copied().enumerate() {
        check_direct_regime(dim, k, a1, a2, opts.t_form.margin)?;
        t[i] = t_form_fn(dim, k, a1, a2, f, grid, &opts.t_form)?.value;
        r[i] = Alpha3Continuation::new(dim, a1, a2, f, grid)?.residue(k, opts.ring_radius, opts.ring_size)?.residue;
        e[i] = k111_residue_expression(dim, k, a1, a2);
        norm[i] = e[i] * ((a1 + a2) * std::f64::consts::LN_2).exp();
    }
    let t_ratio = t[0] / t[1];
    let residue_ratio = r[0] / r[1];
    let expression_ratio = e[0] / e[1];
    Ok(ClosedFormRatioReport {
        points,
        t_ratio,
        residue_ratio,
        expression_ratio,
        defect: (t_ratio / expression_ratio - 1.0).norm(),
        normalized_defect: (t_ratio / (norm[0] / norm[1]) - 1.0).norm(),
        residue_vs_t: (residue_ratio / t_ratio - 1.0).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trilinear::closed_form::k111_exact_n3;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn continuation_matches_closed_form() {
        let d = Dimension::three();
        let grid = Grid::with_sizes(12, 24).unwrap();
        let one = crate::sphgrid::HarmonicCoeffs::constant(0, c(1.0));
        let (a1, a2) = (c(3.2), c(4.1));
        let cont = Alpha3Continuation::new(d, a1, a2, [&one, &one, &one], &grid).unwrap();
        // inside and outside the convergence region
        for a3 in [c(1.3), Complex64::new(-1.4, 0.2), Complex64::new(-2.6, -0.1)] {
            let v = cont.value(a3).unwrap();
            let exact = k111_exact_n3([a1, a2, a3]);
            assert!(((v - exact) / exact).norm() < 1e-6, "{a3}: {v} vs {exact}");
        }
    }
}
