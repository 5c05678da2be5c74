//! `SO₀(1,n)` acting projectively on `S^{n−1}` and its conformal factor.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};

/// Entrywise tolerance for group-membership checks.
pub const GROUP_TOL: f64 = 1e-10;

/// Ambient dimension `n` of `ℝⁿ ⊃ S^{n−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Dimension {
    n: usize,
}

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self { n })
    }

    /// The two-sphere in `ℝ³`.
    pub fn three() -> Self {
        Self { n: 3 }
    }

    pub fn n(self) -> usize {
        self.n
    }

    /// ρ = (n−1)/2.
    pub fn rho(self) -> f64 {
        (self.n as f64 - 1.0) / 2.0
    }

    pub(crate) fn require(self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.n,
            });
        }
        Ok(())
    }
}

/// A unit vector in `ℝⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    pub const NORM_TOL: f64 = 1e-12;

    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotOnSphere((norm - 1.0).abs()));
        }
        Ok(Self { coords })
    }

    /// Projects a non-zero vector onto the sphere.
    pub fn normalized(mut coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotOnSphere(f64::NAN));
        }
        coords.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { coords })
    }

    /// The base point `𝟏 = (1, 0, …, 0)`.
    pub fn base(dim: Dimension) -> Self {
        let mut coords = vec![0.0; dim.n()];
        coords[0] = 1.0;
        Self { coords }
    }

    pub fn from3(x: [f64; 3]) -> Result<Self> {
        Self::new(x.to_vec())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Coordinates as a fixed array; panics unless n = 3.
    pub fn as3(&self) -> [f64; 3] {
        [self.coords[0], self.coords[1], self.coords[2]]
    }

    /// Uniformly distributed random point.
    pub fn random<R: Rng>(dim: Dimension, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..dim.n()).map(|_| rng.sample(StandardNormal)).collect();
            if let Ok(p) = Self::normalized(v) {
                return p;
            }
        }
    }

    /// Euclidean distance in `ℝⁿ`.
    pub fn distance(&self, other: &SpherePoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// An element of `SO₀(1,n)` stored as an `(n+1)×(n+1)` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMap {
    m: DMatrix<f64>,
}

fn lorentz_metric(size: usize) -> DMatrix<f64> {
    let mut j = DMatrix::<f64>::identity(size, size) * -1.0;
    j[(0, 0)] = 1.0;
    j
}

impl ConformalMap {
    /// Validates `mᵀJm = J`, `det m = 1` and `m₀₀ > 0`.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        let size = m.nrows();
        if size != m.ncols() || size < 4 {
            return Err(Error::NotInGroup(format!("shape {}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotInGroup("non-finite entry".into()));
        }
        let j = lorentz_metric(size);
        let defect = (m.transpose() * &j * &m - &j).amax();
        if defect > GROUP_TOL {
            return Err(Error::NotInGroup(format!("|m^T J m - J| = {defect:e}")));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > GROUP_TOL {
            return Err(Error::NotInGroup(format!("det = {det}")));
        }
        if m[(0, 0)] <= 0.0 {
            return Err(Error::NotInGroup("m00 <= 0 (not the identity component)".into()));
        }
        Ok(Self { m })
    }

    pub fn identity(dim: Dimension) -> Self {
        Self {
            m: DMatrix::identity(dim.n() + 1, dim.n() + 1),
        }
    }

    /// `a_t`: hyperbolic rotation in the `(y₀, y₁)` plane.
    pub fn boost(t: f64, dim: Dimension) -> Self {
        let mut m = DMatrix::identity(dim.n() + 1, dim.n() + 1);
        let (c, s) = (t.cosh(), t.sinh());
        m[(0, 0)] = c;
        m[(0, 1)] = s;
        m[(1, 0)] = s;
        m[(1, 1)] = c;
        Self { m }
    }

    /// `n_ξ`, ξ ∈ ℝ^{n−1}; fixes the base point.
    pub fn translation(xi: &[f64], dim: Dimension) -> Result<Self> {
        let n = dim.n();
        if xi.len() != n - 1 {
            return Err(Error::InvalidArgument(format!(
                "translation vector must have length {}, got {}",
                n - 1,
                xi.len()
            )));
        }
        let q = xi.iter().map(|v| v * v).sum::<f64>() / 2.0;
        let mut m = DMatrix::identity(n + 1, n + 1);
        m[(0, 0)] = 1.0 + q;
        m[(0, 1)] = -q;
        m[(1, 0)] = q;
        m[(1, 1)] = 1.0 - q;
        for (i, &v) in xi.iter().enumerate() {
            m[(0, i + 2)] = v;
            m[(1, i + 2)] = v;
            m[(i + 2, 0)] = v;
            m[(i + 2, 1)] = -v;
        }
        Ok(Self { m })
    }

    /// Embeds `k ∈ SO(n)` as `diag(1, k)`.
    pub fn rotation(k: &DMatrix<f64>, dim: Dimension) -> Result<Self> {
        let n = dim.n();
        if k.nrows() != n || k.ncols() != n {
            return Err(Error::NotOrthogonal(format!(
                "expected {n}x{n}, got {}x{}",
                k.nrows(),
                k.ncols()
            )));
        }
        let defect = (k.transpose() * k - DMatrix::<f64>::identity(n, n)).amax();
        if defect > GROUP_TOL {
            return Err(Error::NotOrthogonal(format!("|k^T k - I| = {defect:e}")));
        }
        let det = k.determinant();
        if (det - 1.0).abs() > GROUP_TOL {
            return Err(Error::NotOrthogonal(format!("det = {det}")));
        }
        let mut m = DMatrix::identity(n + 1, n + 1);
        m.view_mut((1, 1), (n, n)).copy_from(k);
        Ok(Self { m })
    }

    /// Rotation by `angle` in the coordinate plane `(i, j)` of `ℝⁿ`.
    pub fn plane_rotation(i: usize, j: usize, angle: f64, dim: Dimension) -> Result<Self> {
        let n = dim.n();
        if i >= n || j >= n || i == j {
            return Err(Error::InvalidArgument(format!("bad rotation plane ({i},{j})")));
        }
        let mut k = DMatrix::identity(n, n);
        let (c, s) = (angle.cos(), angle.sin());
        k[(i, i)] = c;
        k[(j, j)] = c;
        k[(i, j)] = -s;
        k[(j, i)] = s;
        Self::rotation(&k, dim)
    }

    /// Haar-random rotation (QR of a Gaussian matrix with sign fixing).
    pub fn random_rotation<R: Rng>(dim: Dimension, rng: &mut R) -> Self {
        let n = dim.n();
        let a = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        let qr = a.qr();
        let mut q = qr.q();
        let r = qr.r();
        for c in 0..n {
            if r[(c, c)] < 0.0 {
                q.column_mut(c).neg_mut();
            }
        }
        if q.determinant() < 0.0 {
            q.column_mut(0).neg_mut();
        }
        let mut m = DMatrix::identity(n + 1, n + 1);
        m.view_mut((1, 1), (n, n)).copy_from(&q);
        Self { m }
    }

    /// Deterministic pseudo-random element `k₁ a_t k₂` with `|t| ≤ max_boost`.
    ///
    /// The hyperbolic displacement of the result is exactly `|t|`, so
    /// `max_boost` bounds how far the element is from `K`.
    pub fn random_element(dim: Dimension, seed: u64, max_boost: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k1 = Self::random_rotation(dim, &mut rng);
        let t = if max_boost > 0.0 {
            rng.random_range(-max_boost..=max_boost)
        } else {
            0.0
        };
        let k2 = Self::random_rotation(dim, &mut rng);
        k1.compose(&Self::boost(t, dim)).compose(&k2)
    }

    pub fn dim(&self) -> Dimension {
        Dimension {
            n: self.m.nrows() - 1,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ConformalMap) -> ConformalMap {
        ConformalMap {
            m: &self.m * &other.m,
        }
    }

    /// `g⁻¹ = J gᵀ J`.
    pub fn inverse(&self) -> ConformalMap {
        let j = lorentz_metric(self.m.nrows());
        ConformalMap {
            m: &j * self.m.transpose() * &j,
        }
    }

    /// Hyperbolic displacement `arccosh(m₀₀)`; equals `|t|` for `k₁ a_t k₂`.
    pub fn displacement(&self) -> f64 {
        self.m[(0, 0)].max(1.0).acosh()
    }

    /// Writes `g(x)` into `out` and returns `(g·(1,x))₀`.
    #[inline]
    pub fn apply_raw(&self, x: &[f64], out: &mut [f64]) -> f64 {
        let size = self.m.nrows();
        let mut y0 = self.m[(0, 0)];
        for c in 1..size {
            y0 += self.m[(0, c)] * x[c - 1];
        }
        for r in 1..size {
            let mut acc = self.m[(r, 0)];
            for c in 1..size {
                acc += self.m[(r, c)] * x[c - 1];
            }
            out[r - 1] = acc / y0;
        }
        y0
    }

    /// `(g(x), κ(g,x))` for `n = 3`, without allocation.
    #[inline]
    pub fn act3(&self, x: [f64; 3]) -> ([f64; 3], f64) {
        let mut out = [0.0; 3];
        let y0 = self.apply_raw(&x, &mut out);
        (out, 1.0 / y0)
    }

    pub fn act(&self, x: &SpherePoint) -> Result<SpherePoint> {
        let mut out = vec![0.0; x.dim()];
        let y0 = self.apply_raw(x.coords(), &mut out);
        if !(y0.is_finite() && y0 > 0.0) {
            return Err(Error::DegenerateAction(y0));
        }
        // re-project to absorb rounding
        SpherePoint::normalized(out)
    }

    /// κ(g,x) = ((g·(1,x))₀)⁻¹.
    pub fn conformal_factor(&self, x: &SpherePoint) -> f64 {
        let size = self.m.nrows();
        let mut y0 = self.m[(0, 0)];
        for c in 1..size {
            y0 += self.m[(0, c)] * x.coords()[c - 1];
        }
        1.0 / y0
    }

    /// Vector `g·(1,x)` in `ℝ^{1,n}` (exposed for diagnostics).
    pub fn lift(&self, x: &SpherePoint) -> DVector<f64> {
        let mut v = DVector::zeros(self.m.nrows());
        v[0] = 1.0;
        v.rows_mut(1, x.dim()).copy_from_slice(x.coords());
        &self.m * v
    }
}

/// `|κ(g₁g₂,x) − κ(g₁,g₂(x)) κ(g₂,x)| / κ(g₁g₂,x)`.
pub fn cocycle_defect(g1: &ConformalMap, g2: &ConformalMap, x: &SpherePoint) -> Result<f64> {
    let lhs = g1.compose(g2).conformal_factor(x);
    let y = g2.act(x)?;
    let rhs = g1.conformal_factor(&y) * g2.conformal_factor(x);
    Ok((lhs - rhs).abs() / lhs)
}

/// `|κ(g, g⁻¹(x)) κ(g⁻¹, x) − 1|`.
pub fn inverse_law_defect(g: &ConformalMap, x: &SpherePoint) -> Result<f64> {
    let gi = g.inverse();
    let y = gi.act(x)?;
    Ok((g.conformal_factor(&y) * gi.conformal_factor(x) - 1.0).abs())
}

/// `| |g(x)−g(y)| − κ(g,x)^{1/2} |x−y| κ(g,y)^{1/2} |`.
pub fn distance_covariance_defect(g: &ConformalMap, x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    let lhs = g.act(x)?.distance(&g.act(y)?);
    let rhs = (g.conformal_factor(x) * g.conformal_factor(y)).sqrt() * x.distance(y);
    Ok((lhs - rhs).abs())
}
