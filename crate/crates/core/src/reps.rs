//! The spherical principal series on `S²`:
//! `π_λ(g) f(x) = κ(g⁻¹, x)^{ρ+λ} f(g⁻¹(x))`.
//!
//! Functions are evaluated lazily through [`SphereFunction`], so compositions
//! like `π_λ(g₁) π_λ(g₂) f` are computed exactly at every node; pulled-back
//! band-limited functions are synthesized at the mapped points rather than
//! interpolated.

use num_complex::Complex64;
use std::sync::Arc;

use crate::error::Result;
use crate::lorentz::{ConformalMap, Dimension};
use crate::spectral_ops::{riesz_multipliers, MultiplierFamily, DIRECT_MARGIN};
use crate::sphgrid::{sht_forward, sht_inverse, Grid, GridFunction, HarmonicCoeffs};

/// Spectral parameter `λ` of `π_λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepParameter {
    pub lambda: Complex64,
}

impl RepParameter {
    pub fn new(lambda: Complex64) -> Self {
        RepParameter { lambda }
    }

    pub fn real(lambda: f64) -> Self {
        RepParameter { lambda: Complex64::new(lambda, 0.0) }
    }
}

/// A function on `S²` that can be evaluated anywhere.
pub trait SphereFunction: Sync {
    fn eval(&self, x: [f64; 3]) -> Complex64;

    /// Samples on every node of `grid`.
    fn sample(&self, grid: &Arc<Grid>) -> GridFunction {
        let values = grid.points().into_iter().map(|x| self.eval(x)).collect();
        GridFunction::new(grid.clone(), values).expect("sphere function values are finite")
    }
}

impl SphereFunction for HarmonicCoeffs {
    fn eval(&self, x: [f64; 3]) -> Complex64 {
        self.eval_at(x)
    }
}

impl<F: Fn([f64; 3]) -> Complex64 + Sync> SphereFunction for F {
    fn eval(&self, x: [f64; 3]) -> Complex64 {
        self(x)
    }
}

/// `κ^{z}` for a positive real base.
#[inline]
pub fn real_pow(kappa: f64, z: Complex64) -> Complex64 {
    (z * kappa.ln()).exp()
}

/// Lazy `π_λ(g) f`.
pub struct PrincipalSeries<'a> {
    exponent: Complex64,
    g_inv: ConformalMap,
    inner: &'a dyn SphereFunction,
}

impl<'a> PrincipalSeries<'a> {
    pub fn new(lambda: RepParameter, g: &ConformalMap, inner: &'a dyn SphereFunction) -> Result<Self> {
        let dim = g.dim();
        dim.require(3)?;
        Ok(PrincipalSeries { exponent: lambda.lambda + dim.rho(), g_inv: g.inverse(), inner })
    }
}

impl SphereFunction for PrincipalSeries<'_> {
    fn eval(&self, x: [f64; 3]) -> Complex64 {
        let (y, kappa) = self.g_inv.act3(x);
        real_pow(kappa, self.exponent) * self.inner.eval(y)
    }
}

/// `π_λ(g) f` on the grid of `f`. `f` is expanded to the grid degree first,
/// which is exact when `f` is band-limited at that degree.
pub fn pi_act(dim: Dimension, lambda: RepParameter, g: &ConformalMap, f: &GridFunction) -> Result<GridFunction> {
    dim.require(3)?;
    let c = sht_forward(f);
    pi_act_fn(lambda, g, &c, f.grid())
}

/// `π_λ(g) f` sampled on `grid` for any evaluable `f`.
pub fn pi_act_fn(lambda: RepParameter, g: &ConformalMap, f: &dyn SphereFunction, grid: &Arc<Grid>) -> Result<GridFunction> {
    Ok(PrincipalSeries::new(lambda, g, f)?.sample(grid))
}

/// `|∫ π_λ(g)f · φ dσ − ∫ f · π_{−λ}(g⁻¹)φ dσ|` on `grid`.
pub fn duality_defect(
    dim: Dimension,
    lambda: RepParameter,
    g: &ConformalMap,
    f: &HarmonicCoeffs,
    phi: &HarmonicCoeffs,
    grid: &Arc<Grid>,
) -> Result<f64> {
    dim.require(3)?;
    let lhs = pi_act_fn(lambda, g, f, grid)?.mul(&phi.sample(grid))?.quad();
    let minus = RepParameter::new(-lambda.lambda);
    let rhs = f.sample(grid).mul(&pi_act_fn(minus, &g.inverse(), phi, grid)?)?.quad();
    Ok((lhs - rhs).norm())
}

/// `(π_λ(g)δ, φ) = κ(g,𝟏)^{ρ−λ} φ(g(𝟏))`.
pub fn dirac_pair(dim: Dimension, lambda: RepParameter, g: &ConformalMap, phi: &dyn SphereFunction) -> Result<Complex64> {
    dim.require(3)?;
    let (y, kappa) = g.act3([1.0, 0.0, 0.0]);
    Ok(real_pow(kappa, dim.rho() - lambda.lambda) * phi.eval(y))
}

/// The same pairing from the definition `(δ, π_{−λ}(g⁻¹)φ)`.
pub fn dirac_pair_distributional(
    dim: Dimension,
    lambda: RepParameter,
    g: &ConformalMap,
    phi: &dyn SphereFunction,
) -> Result<Complex64> {
    dim.require(3)?;
    let pulled = PrincipalSeries::new(RepParameter::new(-lambda.lambda), &g.inverse(), phi)?;
    Ok(pulled.eval([1.0, 0.0, 0.0]))
}

/// `|∫ f(g⁻¹(x)) dσ − ∫ f(y) κ(g,y)^{n−1} dσ| / (‖f‖∞ |S|)` on `grid`, with
/// `‖f‖∞` taken over the nodes.
pub fn change_of_variables_defect(g: &ConformalMap, f: &dyn SphereFunction, grid: &Arc<Grid>) -> Result<f64> {
    let dim = g.dim();
    dim.require(3)?;
    let g_inv = g.inverse();
    let moved = GridFunction::from_fn(grid.clone(), |x| f.eval(g_inv.act3(x).0))?;
    let power = (dim.n() - 1) as i32;
    let weighted = GridFunction::from_fn(grid.clone(), |y| f.eval(y) * g.act3(y).1.powi(power))?;
    let sup = f.sample(grid).max_abs();
    let area = 4.0 * std::f64::consts::PI;
    Ok((moved.quad() - weighted.quad()).norm() / (sup * area))
}

/// `‖A π_μ(g) f − π_ν(g) A f‖₂ / ‖f‖₂` for a degree multiplier `A` given by
/// `mult(l_max)`. `π_μ(g) f` is expanded at degree `field_l · factor`, and
/// the norm is taken on the grid of that degree.
fn intertwining_defect_with<M>(
    mu: Complex64,
    nu: Complex64,
    g: &ConformalMap,
    f: &HarmonicCoeffs,
    field_l: usize,
    factor: usize,
    mult: M,
) -> Result<f64>
where
    M: Fn(usize) -> Result<Vec<Complex64>>,
{
    g.dim().require(3)?;
    let lk = field_l * factor.max(1);
    let fine = Grid::new(lk)?;
    let m = mult(lk)?;
    let moved = pi_act_fn(RepParameter::new(mu), g, f, &fine)?;
    let lhs = sht_inverse(&sht_forward(&moved).apply_degree_multiplier(&m)?, &fine);
    let af = f.resized(lk).apply_degree_multiplier(&m)?;
    let rhs = pi_act_fn(RepParameter::new(nu), g, &af, &fine)?;
    Ok(lhs.sub(&rhs)?.norm_l2() / f.norm_l2())
}

/// `‖R_k π_{−k}(g) f − π_k(g) R_k f‖₂ / ‖f‖₂`.
pub fn residue_intertwining_defect(
    dim: Dimension,
    k: usize,
    g: &ConformalMap,
    f: &HarmonicCoeffs,
    field_l: usize,
    factor: usize,
) -> Result<f64> {
    let kk = Complex64::new(k as f64, 0.0);
    intertwining_defect_with(-kk, kk, g, f, field_l, factor, |l| {
        Ok(MultiplierFamily::residue_operator(dim, k, l).values)
    })
}

/// `‖K π_λ(g) f − π_{−λ}(g) K f‖₂ / ‖f‖₂` with `K` the kernel `|x−y|^{−2ρ+2λ}`.
pub fn knapp_stein_intertwining_defect(
    dim: Dimension,
    lambda: Complex64,
    g: &ConformalMap,
    f: &HarmonicCoeffs,
    field_l: usize,
    factor: usize,
) -> Result<f64> {
    let s = lambda * 2.0 - 2.0 * dim.rho();
    intertwining_defect_with(lambda, -lambda, g, f, field_l, factor, |l| riesz_multipliers(dim, s, l, DIRECT_MARGIN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d3() -> Dimension {
        Dimension::three()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn identity_and_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = HarmonicCoeffs::random(5, &mut rng, false);
        let grid = Grid::new(8).unwrap();
        let lam = RepParameter::new(Complex64::new(0.3, 0.8));
        let id = ConformalMap::identity(d3());
        let a = pi_act_fn(lam, &id, &f, &grid).unwrap();
        let b = f.sample(&grid);
        assert!(a.sub(&b).unwrap().max_abs() < 1e-13);
        let k = ConformalMap::random_rotation(d3(), &mut rng);
        let kinv = k.inverse();
        let a = pi_act_fn(lam, &k, &f, &grid).unwrap();
        for (idx, x) in grid.points().iter().enumerate() {
            let (y, kappa) = kinv.act3(*x);
            assert!((kappa - 1.0).abs() < 1e-13);
            assert!((a.values()[idx] - f.eval_at(y)).norm() < 1e-12);
        }
    }

    #[test]
    fn group_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = HarmonicCoeffs::random(6, &mut rng, false);
        let g1 = ConformalMap::random_element(d3(), 21, 0.5);
        let g2 = ConformalMap::random_element(d3(), 22, 0.5);
        let lam = RepParameter::new(Complex64::new(-0.4, 1.1));
        let inner = PrincipalSeries::new(lam, &g2, &f).unwrap();
        let outer = PrincipalSeries::new(lam, &g1, &inner).unwrap();
        let direct = PrincipalSeries::new(lam, &g1.compose(&g2), &f).unwrap();
        let grid = Grid::new(10).unwrap();
        for x in grid.points() {
            let (a, b) = (outer.eval(x), direct.eval(x));
            assert!((a - b).norm() <= 1e-9 * b.norm().max(1.0));
        }
    }

    #[test]
    fn grid_entry_point_matches_lazy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = HarmonicCoeffs::random(6, &mut rng, false);
        let grid = Grid::new(12).unwrap();
        let g = ConformalMap::boost(0.4, d3());
        let lam = RepParameter::real(0.25);
        let a = pi_act(d3(), lam, &g, &f.sample(&grid)).unwrap();
        let b = pi_act_fn(lam, &g, &f, &grid).unwrap();
        assert!(a.sub(&b).unwrap().max_abs() < 1e-11);
    }

    #[test]
    fn duality_examples() {
        let grid = Grid::new(40).unwrap();
        let f = HarmonicCoeffs::single(2, 2, 1);
        let g = ConformalMap::boost(0.3, d3());
        let defect = duality_defect(d3(), RepParameter::real(0.7), &g, &f, &f, &grid).unwrap();
        assert!(defect <= 1e-6, "{defect}");
        let rot = ConformalMap::plane_rotation(1, 2, 0.7, d3()).unwrap();
        let defect = duality_defect(d3(), RepParameter::real(0.0), &rot, &f, &f, &grid).unwrap();
        assert!(defect <= 1e-12, "{defect}");
    }

    #[test]
    fn unitary_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = HarmonicCoeffs::random(4, &mut rng, false);
        let grid = Grid::new(48).unwrap();
        let g = ConformalMap::random_element(d3(), 5, 0.4);
        let pf = pi_act_fn(RepParameter::new(Complex64::new(0.0, 0.9)), &g, &f, &grid).unwrap();
        assert!((pf.norm_l2() - f.norm_l2()).abs() < 1e-6 * f.norm_l2());
    }

    #[test]
    fn dirac_law() {
        let phi = |x: [f64; 3]| c(1.0 + x[0] * x[0] - 0.5 * x[2]);
        let t = 0.6;
        let lam = RepParameter::new(Complex64::new(0.2, -0.3));
        let v = dirac_pair(d3(), lam, &ConformalMap::boost(t, d3()), &phi).unwrap();
        let e = ((lam.lambda - 1.0) * t).exp() * phi([1.0, 0.0, 0.0]);
        assert!((v - e).norm() < 1e-13);
        for seed in 0..5 {
            let g = ConformalMap::random_element(d3(), seed, 0.8);
            let a = dirac_pair(d3(), lam, &g, &phi).unwrap();
            let b = dirac_pair_distributional(d3(), lam, &g, &phi).unwrap();
            assert!((a - b).norm() < 1e-9 * a.norm());
        }
    }

    #[test]
    fn wrong_dimension_rejected() {
        let d4 = Dimension::new(4).unwrap();
        let g = ConformalMap::identity(d4);
        let f = HarmonicCoeffs::zeros(1);
        assert!(PrincipalSeries::new(RepParameter::real(0.0), &g, &f).is_err());
    }
}
