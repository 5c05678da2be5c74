//! The singular forms
//! `𝒯_k(f₁,f₂,f₃) = ∬ f₃(x₃) f₂(x) Δ_k[f₁ |x₃−·|^{s₂}](x) |x−x₃|^{s₁} dσ(x) dσ(x₃)`
//! with `s_j = −ρ + α_j`, evaluated in the direct regime.
//!
//! For each outer node `x₃` the inner function is sampled on a finer grid,
//! `Δ_k` acts on its coefficients, and the outer kernel is applied through
//! its Funk–Hecke eigenvalues at `x₃`.

use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

use super::kform::CONVERGENCE_MARGIN;
use super::params::ParameterTriple;
use crate::error::{Error, Result};
use crate::lorentz::{ConformalMap, Dimension};
use crate::reps::{PrincipalSeries, RepParameter, SphereFunction};
use crate::spectral_ops::{gjms_multiplier, knapp_stein_multipliers, riesz_multipliers, DIRECT_MARGIN};
use crate::sphgrid::{sht_forward, sht_inverse, sph_harm_all, Grid, GridFunction};

pub const FINE_FACTOR: usize = 4;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TFormOptions {
    /// Inner degree as a multiple of the outer grid degree.
    pub fine_factor: usize,
    pub margin: f64,
}

impl Default for TFormOptions {
    fn default() -> Self {
        TFormOptions { fine_factor: FINE_FACTOR, margin: CONVERGENCE_MARGIN }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TFormValue {
    pub value: Complex64,
    /// Contribution of the upper half of the inner spectrum.
    pub truncation_error_estimate: f64,
    pub outer_l_max: usize,
    pub inner_l_max: usize,
}

/// Parameters `(α₁, α₂, −ρ−2k)`.
pub fn t_parameters(dim: Dimension, k: usize, alpha1: Complex64, alpha2: Complex64) -> ParameterTriple {
    ParameterTriple::from_alpha([alpha1, alpha2, Complex64::new(-dim.rho() - 2.0 * k as f64, 0.0)])
}

/// `Re(−ρ+α₂) > 2k+1` and `Re α₁ > −ρ + margin`.
pub fn check_direct_regime(dim: Dimension, k: usize, alpha1: Complex64, alpha2: Complex64, margin: f64) -> Result<()> {
    if dim.n() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, actual: dim.n() });
    }
    let rho = dim.rho();
    if (alpha2 - rho).re <= 2.0 * k as f64 + 1.0 || alpha1.re <= -rho + margin {
        return Err(Error::OutsideDirectRegime(format!(
            "T_{k} at α₁ = {alpha1}, α₂ = {alpha2} needs Re(α₂ − ρ) > {} and Re α₁ > {}; \
             elsewhere the form is defined by meromorphic continuation in (α₁, α₂), which is not evaluated numerically",
            2 * k + 1,
            -rho + margin
        )));
    }
    Ok(())
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// `𝒯_k` with the outer integral on `outer` and exact evaluation of the
/// `f_i` at every node.
pub fn t_form_fn(
    dim: Dimension,
    k: usize,
    alpha1: Complex64,
    alpha2: Complex64,
    f: [&dyn SphereFunction; 3],
    outer: &Arc<Grid>,
    opts: &TFormOptions,
) -> Result<TFormValue> {
    check_direct_regime(dim, k, alpha1, alpha2, opts.margin)?;
    if opts.fine_factor == 0 {
        return Err(Error::InvalidArgument("fine factor must be positive".into()));
    }
    let rho = dim.rho();
    let s2 = alpha2 - rho;
    let lf = outer.l_max().max(1) * opts.fine_factor;
    let fine = Grid::new(lf)?;
    let fine_pts = fine.points();
    let f1 = f[0].sample(&fine);
    let f2 = f[1].sample(&fine);
    let mult: Vec<Complex64> = (0..=lf).map(|l| Complex64::new(gjms_multiplier(dim, k, l), 0.0)).collect();
    let e1 = knapp_stein_multipliers(dim, alpha1, lf, DIRECT_MARGIN)?;
    let half = lf / 2;

    let w = outer.weights();
    let mut total = Complex64::new(0.0, 0.0);
    let mut tail = Complex64::new(0.0, 0.0);
    let mut buf = vec![Complex64::new(0.0, 0.0); fine.len()];
    for (q, x3) in outer.points().into_iter().enumerate() {
        let f3 = f[2].eval(x3);
        for (j, x) in fine_pts.iter().enumerate() {
            let r = distance(*x, x3);
            buf[j] = if r == 0.0 { Complex64::new(0.0, 0.0) } else { f1.values()[j] * (s2 * r.ln()).exp() };
        }
        let c = sht_forward(&GridFunction::new(fine.clone(), buf.clone())?).apply_degree_multiplier(&mult)?;
        let g = sht_inverse(&c, &fine);
        let p = g.mul(&f2)?;
        let d = sht_forward(&p);
        let y = sph_harm_all(lf, x3);
        let (mut v, mut t) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for l in (0..=lf).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for idx in l * l..(l + 1) * (l + 1) {
                acc += d.as_slice()[idx] * y[idx];
            }
            let term = e1[l] * acc;
            v += term;
            if l > half {
                t += term;
            }
        }
        total += w[q] * f3 * v;
        tail += w[q] * f3 * t;
    }
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(Error::NonFinite("singular trilinear form"));
    }
    Ok(TFormValue { value: total, truncation_error_estimate: tail.norm(), outer_l_max: outer.l_max(), inner_l_max: lf })
}

/// `𝒯_k` for grid samples; the samples are expanded at the grid degree and
/// the expansion is evaluated on the inner grid.
pub fn t_form(
    dim: Dimension,
    k: usize,
    alpha1: Complex64,
    alpha2: Complex64,
    f: [&GridFunction; 3],
    opts: &TFormOptions,
) -> Result<TFormValue> {
    let outer = f[0].grid().clone();
    let c: Vec<_> = f.iter().map(|h| sht_forward(h)).collect();
    t_form_fn(dim, k, alpha1, alpha2, [&c[0], &c[1], &c[2]], &outer, opts)
}

/// `𝒯₀` through the reduction `∬ f₃(y) (f₁f₂)(x) |x−y|^{s₁+s₂}`, with the
/// kernel applied spectrally on `grid`.
pub fn t0_reduced(dim: Dimension, alpha1: Complex64, alpha2: Complex64, f: [&dyn SphereFunction; 3], grid: &Arc<Grid>) -> Result<Complex64> {
    check_direct_regime(dim, 0, alpha1, alpha2, CONVERGENCE_MARGIN)?;
    let s = alpha1 + alpha2 - 2.0 * dim.rho();
    let prod = f[0].sample(grid).mul(&f[1].sample(grid))?;
    let a = sht_forward(&prod);
    let b = sht_forward(&f[2].sample(grid));
    let e = riesz_multipliers(dim, s, grid.l_max(), DIRECT_MARGIN)?;
    Ok(a.degree_pairing(&b).iter().zip(&e).map(|(x, y)| x * y).sum())
}

/// `|𝒯_k(π_{λ₁}(g)f₁, π_{λ₂}(g)f₂, π_{λ₃}(g)f₃) − 𝒯_k(f₁,f₂,f₃)| / |𝒯_k(f₁,f₂,f₃)|`
/// with `𝛌` from `(α₁, α₂, −ρ−2k)`.
#[allow(clippy::too_many_arguments)]
pub fn t_invariance_defect(
    dim: Dimension,
    k: usize,
    alpha1: Complex64,
    alpha2: Complex64,
    g: &ConformalMap,
    f: [&dyn SphereFunction; 3],
    outer: &Arc<Grid>,
    opts: &TFormOptions,
) -> Result<f64> {
    let lam = t_parameters(dim, k, alpha1, alpha2).lambda;
    let m0 = PrincipalSeries::new(RepParameter::new(lam[0]), g, f[0])?;
    let m1 = PrincipalSeries::new(RepParameter::new(lam[1]), g, f[1])?;
    let m2 = PrincipalSeries::new(RepParameter::new(lam[2]), g, f[2])?;
    let base = t_form_fn(dim, k, alpha1, alpha2, f, outer, opts)?.value;
    let moved = t_form_fn(dim, k, alpha1, alpha2, [&m0, &m1, &m2], outer, opts)?.value;
    Ok((moved - base).norm() / base.norm())
}
