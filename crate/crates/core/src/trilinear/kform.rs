//! The generic form
//! `𝒦_𝛂(f₁,f₂,f₃) = ∭ |x₂−x₃|^{s₁} |x₃−x₁|^{s₂} |x₁−x₂|^{s₃} f₁f₂f₃`,
//! `s_j = −ρ + α_j`, by product quadrature on a grid.
//!
//! Kernel matrices carry a corrected diagonal: the node `x_i` receives the
//! weight that makes row `i` integrate the constant function exactly, which
//! removes the leading error of dropping the singular sample.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

use super::params::ParameterTriple;
use crate::error::{Error, Result};
use crate::lorentz::{ConformalMap, Dimension};
use crate::reps::{pi_act_fn, RepParameter, SphereFunction};
use crate::spectral_ops::{knapp_stein_multipliers, DIRECT_MARGIN};
use crate::sphgrid::{sht_forward, sht_inverse, Grid, GridFunction};

pub const CONVERGENCE_MARGIN: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KMethod {
    Direct,
    Fast,
}

/// Treatment of the singular `i = j` entries of `|x_i − x_j|^s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagonalRule {
    /// Sample dropped.
    Drop,
    /// Row-wise correction against `∫ |x−y|^s dσ(y)`.
    Corrected,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KFormOptions {
    pub method: KMethod,
    pub margin: f64,
    pub diagonal: DiagonalRule,
}

impl Default for KFormOptions {
    fn default() -> Self {
        KFormOptions { method: KMethod::Direct, margin: CONVERGENCE_MARGIN, diagonal: DiagonalRule::Corrected }
    }
}

/// `∫_{S²} |x−y|^s dσ(y) = 2^{s+3} π / (s+2)`.
pub fn riesz_row_integral(s: Complex64) -> Complex64 {
    8.0 * PI * (s * std::f64::consts::LN_2).exp() / (s + 2.0)
}

/// Complex matrix as a pair of real ones; `im = None` means real.
#[derive(Clone, Debug)]
pub(crate) struct CMat {
    pub re: DMatrix<f64>,
    pub im: Option<DMatrix<f64>>,
}

impl CMat {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re[(i, j)], self.im.as_ref().map_or(0.0, |m| m[(i, j)]))
    }

    fn mul(&self, other: &CMat) -> CMat {
        let re = &self.re * &other.re;
        match (&self.im, &other.im) {
            (None, None) => CMat { re, im: None },
            (Some(ai), None) => CMat { re, im: Some(ai * &other.re) },
            (None, Some(bi)) => CMat { re, im: Some(&self.re * bi) },
            (Some(ai), Some(bi)) => {
                let re = re - ai * bi;
                let im = &self.re * bi + ai * &other.re;
                CMat { re, im: Some(im) }
            }
        }
    }

    /// `diag(u) · self`.
    fn scale_rows(&self, u: &[Complex64]) -> CMat {
        let real_u = u.iter().all(|z| z.im == 0.0);
        let (n, m) = self.re.shape();
        let mut re = self.re.clone();
        let mut im = if real_u && self.im.is_none() { None } else { Some(DMatrix::zeros(n, m)) };
        for j in 0..m {
            for i in 0..n {
                let z = u[i] * self.get(i, j);
                re[(i, j)] = z.re;
                if let Some(im) = im.as_mut() {
                    im[(i, j)] = z.im;
                }
            }
        }
        CMat { re, im }
    }
}

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// `log |x_i − x_j|` over grid nodes (diagonal −∞).
pub(crate) fn log_distances(points: &[[f64; 3]]) -> DMatrix<f64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |i, j| if i == j { f64::NEG_INFINITY } else { distance(points[i], points[j]).ln() })
}

/// `|x_i − x_j|^s` with the chosen diagonal rule.
pub(crate) fn kernel_matrix(logd: &DMatrix<f64>, weights: &[f64], s: Complex64, rule: DiagonalRule) -> CMat {
    let n = logd.nrows();
    let real = s.im == 0.0;
    let mut re = DMatrix::zeros(n, n);
    let mut im = if real { None } else { Some(DMatrix::zeros(n, n)) };
    let exact = riesz_row_integral(s);
    for j in 0..n {
        for i in 0..n {
            if i == j {
                continue;
            }
            let l = logd[(i, j)];
            if real {
                re[(i, j)] = (s.re * l).exp();
            } else {
                let z = (s * l).exp();
                re[(i, j)] = z.re;
                im.as_mut().unwrap()[(i, j)] = z.im;
            }
        }
    }
    if rule == DiagonalRule::Corrected {
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let v = Complex64::new(re[(i, j)], im.as_ref().map_or(0.0, |m| m[(i, j)]));
                    acc += weights[j] * v;
                }
            }
            let d = (exact - acc) / weights[i];
            re[(i, i)] = d.re;
            if let Some(m) = im.as_mut() {
                m[(i, i)] = d.im;
            }
        }
    }
    CMat { re, im }
}

pub(crate) fn check_region(dim: Dimension, params: &ParameterTriple, margin: f64) -> Result<()> {
    if dim.n() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, actual: dim.n() });
    }
    if !params.in_convergence_region(dim, margin) {
        let a = params.alpha;
        return Err(Error::OutsideConvergence(format!(
            "α = ({}, {}, {}) violates Re α_j > -ρ + {margin} or Re Σα > -ρ + {margin}",
            a[0], a[1], a[2]
        )));
    }
    Ok(())
}

fn same_grid(fs: [&GridFunction; 3]) -> Result<Arc<Grid>> {
    let g = fs[0].grid().clone();
    for f in &fs[1..] {
        if !Arc::ptr_eq(f.grid(), &g) && f.grid().len() != g.len() {
            return Err(Error::DimensionMismatch { expected: g.len(), actual: f.grid().len() });
        }
    }
    Ok(g)
}

/// `𝒦_𝛂(f₁,f₂,f₃)` with default options and the given method.
pub fn k_form(dim: Dimension, params: &ParameterTriple, f: [&GridFunction; 3], method: KMethod) -> Result<Complex64> {
    k_form_with(dim, params, f, &KFormOptions { method, ..Default::default() })
}

pub fn k_form_with(dim: Dimension, params: &ParameterTriple, f: [&GridFunction; 3], opts: &KFormOptions) -> Result<Complex64> {
    check_region(dim, params, opts.margin)?;
    let grid = same_grid(f)?;
    let value = match opts.method {
        KMethod::Direct => direct(dim, params, f, &grid, opts.diagonal),
        KMethod::Fast => fast(dim, params, f, &grid, opts.diagonal)?,
    };
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonFinite("trilinear quadrature"));
    }
    Ok(value)
}

/// `F₃(x_i, x_j) = Σ_k w_k f₃(x_k) |x_j − x_k|^{s₁} |x_k − x_i|^{s₂}`.
pub(crate) fn inner_pair_matrix(
    dim: Dimension,
    params: &ParameterTriple,
    f3: &GridFunction,
    logd: &DMatrix<f64>,
    rule: DiagonalRule,
) -> CMat {
    let grid = f3.grid();
    let w = grid.weights();
    let s = params.exponents(dim);
    let u3: Vec<Complex64> = f3.values().iter().zip(&w).map(|(v, w)| v * w).collect();
    let a1 = kernel_matrix(logd, &w, s[0], rule);
    let p = a1.scale_rows(&u3);
    drop(a1);
    let a2 = kernel_matrix(logd, &w, s[1], rule);
    a2.mul(&p)
}

fn direct(dim: Dimension, params: &ParameterTriple, f: [&GridFunction; 3], grid: &Arc<Grid>, rule: DiagonalRule) -> Complex64 {
    let w = grid.weights();
    let logd = log_distances(&grid.points());
    let m = inner_pair_matrix(dim, params, f[2], &logd, rule);
    let a3 = kernel_matrix(&logd, &w, params.exponents(dim)[2], rule);
    drop(logd);
    let n = grid.len();
    let u1: Vec<Complex64> = f[0].values().iter().zip(&w).map(|(v, w)| v * w).collect();
    let u2: Vec<Complex64> = f[1].values().iter().zip(&w).map(|(v, w)| v * w).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let mut col = Complex64::new(0.0, 0.0);
        for i in 0..n {
            col += u1[i] * a3.get(i, j) * m.get(i, j);
        }
        total += col * u2[j];
    }
    total
}

fn fast(dim: Dimension, params: &ParameterTriple, f: [&GridFunction; 3], grid: &Arc<Grid>, rule: DiagonalRule) -> Result<Complex64> {
    let s = params.exponents(dim);
    let e1 = knapp_stein_multipliers(dim, params.alpha[0], grid.l_max(), DIRECT_MARGIN)?;
    let w = grid.weights();
    let pts = grid.points();
    let n = grid.len();
    let exact2 = riesz_row_integral(s[1]);
    let exact3 = riesz_row_integral(s[2]);
    let mut total = Complex64::new(0.0, 0.0);
    let mut g = vec![Complex64::new(0.0, 0.0); n];
    let mut k3 = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let x1 = pts[i];
        let (mut acc2, mut acc3) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for j in 0..n {
            if j == i {
                continue;
            }
            let l = distance(pts[j], x1).ln();
            let k2 = (s[1] * l).exp();
            k3[j] = (s[2] * l).exp();
            g[j] = f[2].values()[j] * k2;
            acc2 += w[j] * k2;
            acc3 += w[j] * k3[j];
        }
        let (d2, d3) = match rule {
            DiagonalRule::Drop => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
            DiagonalRule::Corrected => ((exact2 - acc2) / w[i], (exact3 - acc3) / w[i]),
        };
        g[i] = f[2].values()[i] * d2;
        k3[i] = d3;
        let c = sht_forward(&GridFunction::new(grid.clone(), g.clone())?).apply_degree_multiplier(&e1)?;
        let h = sht_inverse(&c, grid);
        let mut inner = Complex64::new(0.0, 0.0);
        for j in 0..n {
            inner += w[j] * f[1].values()[j] * k3[j] * h.values()[j];
        }
        total += w[i] * f[0].values()[i] * inner;
    }
    Ok(total)
}

/// `|𝒦_𝛂(π_{λ₁}(g)f₁, π_{λ₂}(g)f₂, π_{λ₃}(g)f₃) − 𝒦_𝛂(f₁,f₂,f₃)| / |𝒦_𝛂(f₁,f₂,f₃)|`
/// with `𝛌` from `𝛂`; the transformed functions are evaluated exactly at
/// the nodes.
pub fn k_invariance_defect(
    dim: Dimension,
    params: &ParameterTriple,
    g: &ConformalMap,
    f: [&dyn SphereFunction; 3],
    grid: &Arc<Grid>,
    opts: &KFormOptions,
) -> Result<f64> {
    check_region(dim, params, opts.margin)?;
    let plain: Vec<GridFunction> = f.iter().map(|h| h.sample(grid)).collect();
    let moved: Vec<GridFunction> = (0..3)
        .map(|j| pi_act_fn(RepParameter::new(params.lambda[j]), g, f[j], grid))
        .collect::<Result<_>>()?;
    let base = k_form_with(dim, params, [&plain[0], &plain[1], &plain[2]], opts)?;
    let other = k_form_with(dim, params, [&moved[0], &moved[1], &moved[2]], opts)?;
    Ok((other - base).norm() / base.norm())
}
