use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::harmonics::{normalized_legendre_into, table_len};
use super::quadrature::gauss_legendre;
use crate::error::{Error, Result};

/// Upper bound on stored Legendre table entries (f64), about 800 MB.
pub const TABLE_BUDGET: usize = 100_000_000;

/// Gauss–Legendre (in `cos θ`) × uniform-`φ` product grid on `S²`.
pub struct Grid {
    l_max: usize,
    cos_theta: Vec<f64>,
    sin_theta: Vec<f64>,
    theta_weights: Vec<f64>,
    n_phi: usize,
    plm: Vec<f64>,
    fft_fwd: Arc<dyn Fft<f64>>,
    fft_inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("l_max", &self.l_max)
            .field("n_theta", &self.n_theta())
            .field("n_phi", &self.n_phi)
            .finish()
    }
}

impl Grid {
    /// Smallest grid exact for products of two degree-`l_max` harmonics:
    /// `(L+1) × (2L+2)` nodes.
    pub fn new(l_max: usize) -> Result<Arc<Grid>> {
        if l_max == 0 {
            return Err(Error::InvalidArgument("grid degree L must be >= 1".into()));
        }
        Self::with_sizes(l_max + 1, 2 * l_max + 2)
    }

    /// Grid with explicit node counts; the supported degree is
    /// `min(n_theta − 1, (n_phi − 1)/2)`.
    pub fn with_sizes(n_theta: usize, n_phi: usize) -> Result<Arc<Grid>> {
        if n_theta < 2 || n_phi < 3 {
            return Err(Error::InvalidArgument(format!(
                "grid needs n_theta >= 2 and n_phi >= 3 (got {n_theta} x {n_phi})"
            )));
        }
        let l_max = (n_theta - 1).min((n_phi - 1) / 2);
        let entries = n_theta.saturating_mul(table_len(l_max));
        if entries > TABLE_BUDGET {
            return Err(Error::GridTooLarge { nodes: n_theta * n_phi, budget: TABLE_BUDGET });
        }
        let (x, w) = gauss_legendre(n_theta);
        // θ ascending from the x₁ pole
        let cos_theta: Vec<f64> = x.iter().rev().copied().collect();
        let theta_weights: Vec<f64> = w.iter().rev().copied().collect();
        let sin_theta: Vec<f64> = cos_theta.iter().map(|c| ((1.0 - c) * (1.0 + c)).sqrt()).collect();
        let tl = table_len(l_max);
        let mut plm = vec![0.0; n_theta * tl];
        for i in 0..n_theta {
            normalized_legendre_into(l_max, cos_theta[i], sin_theta[i], &mut plm[i * tl..(i + 1) * tl]);
        }
        let mut planner = FftPlanner::new();
        Ok(Arc::new(Grid {
            l_max,
            cos_theta,
            sin_theta,
            theta_weights,
            n_phi,
            plm,
            fft_fwd: planner.plan_fft_forward(n_phi),
            fft_inv: planner.plan_fft_inverse(n_phi),
        }))
    }

    /// Grid for integrands that are not band-limited: degree `factor · l_max`.
    pub fn oversampled(l_max: usize, factor: usize) -> Result<Arc<Grid>> {
        Self::new(l_max * factor.max(1))
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn n_theta(&self) -> usize {
        self.cos_theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.n_theta() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }

    pub fn theta_weights(&self) -> &[f64] {
        &self.theta_weights
    }

    pub fn phi(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_phi as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.sin_theta[i].atan2(self.cos_theta[i])
    }

    /// Node `(i, j)` as a point of `S²`.
    pub fn point(&self, i: usize, j: usize) -> [f64; 3] {
        let (s, c) = self.phi(j).sin_cos();
        [self.cos_theta[i], self.sin_theta[i] * c, self.sin_theta[i] * s]
    }

    /// All nodes in storage order (`θ`-major).
    pub fn points(&self) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n_theta() {
            for j in 0..self.n_phi {
                out.push(self.point(i, j));
            }
        }
        out
    }

    /// Quadrature weight of each node, in storage order.
    pub fn weights(&self) -> Vec<f64> {
        let dphi = 2.0 * PI / self.n_phi as f64;
        let mut out = Vec::with_capacity(self.len());
        for w in &self.theta_weights {
            out.extend(std::iter::repeat_n(w * dphi, self.n_phi));
        }
        out
    }

    pub(crate) fn plm_row(&self, i: usize) -> &[f64] {
        let tl = table_len(self.l_max);
        &self.plm[i * tl..(i + 1) * tl]
    }

    pub(crate) fn fft_forward(&self, buf: &mut [Complex64]) {
        self.fft_fwd.process(buf);
    }

    pub(crate) fn fft_inverse(&self, buf: &mut [Complex64]) {
        self.fft_inv.process(buf);
    }
}

/// Samples of a complex function on the nodes of a [`Grid`].
#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), actual: values.len() });
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("grid function values"));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        GridFunction { grid, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn constant(grid: Arc<Grid>, c: Complex64) -> Self {
        let n = grid.len();
        GridFunction { grid, values: vec![c; n] }
    }

    /// Samples `f` at every node.
    pub fn from_fn<F: FnMut([f64; 3]) -> Complex64>(grid: Arc<Grid>, mut f: F) -> Result<Self> {
        let values = grid.points().into_iter().map(&mut f).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `∫_S f dσ` by the product rule, with compensated summation.
    pub fn quad(&self) -> Complex64 {
        let n_phi = self.grid.n_phi;
        let dphi = 2.0 * PI / n_phi as f64;
        let mut total = Neumaier::default();
        for (i, w) in self.grid.theta_weights.iter().enumerate() {
            let mut row = Neumaier::default();
            for v in &self.values[i * n_phi..(i + 1) * n_phi] {
                row.add(*v);
            }
            total.add(row.sum() * (w * dphi));
        }
        total.sum()
    }

    /// Quadrature `L²` norm.
    pub fn norm_l2(&self) -> f64 {
        self.map(|v| Complex64::new(v.norm_sqr(), 0.0)).quad().re.max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        GridFunction { grid: self.grid.clone(), values: self.values.iter().map(|v| f(*v)).collect() }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(&self, other: &Self, f: F) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.len() != other.grid.len() {
            return Err(Error::DimensionMismatch { expected: self.grid.len(), actual: other.grid.len() });
        }
        Ok(GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `∫ f g dσ` (no conjugation).
    pub fn pair(&self, other: &Self) -> Result<Complex64> {
        Ok(self.mul(other)?.quad())
    }
}

/// Neumaier's compensated summation for complex values.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    re: (f64, f64),
    im: (f64, f64),
}

impl Neumaier {
    fn step(acc: &mut (f64, f64), x: f64) {
        let t = acc.0 + x;
        if acc.0.abs() >= x.abs() {
            acc.1 += (acc.0 - t) + x;
        } else {
            acc.1 += (x - t) + acc.0;
        }
        acc.0 = t;
    }

    pub fn add(&mut self, z: Complex64) {
        Self::step(&mut self.re, z.re);
        Self::step(&mut self.im, z.im);
    }

    pub fn sum(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}
