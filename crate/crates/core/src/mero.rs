//! Regularised pairings with `h_s(x) = |𝟏−x|^s` and `k_α(x,y) = |x−y|^{−ρ+α}`,
//! their meromorphic continuation, and residues by contour fitting.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lorentz::Dimension;
use crate::spectral_ops::{
    bernstein_apply, descent_steps, knapp_stein_multipliers, near_riesz_pole, residue_operator_apply, riesz_multipliers,
    DIRECT_MARGIN, POLE_GUARD,
};
use crate::sphgrid::zonal::riesz_eigenvalues_direct;
use crate::sphgrid::{sht_forward, sph_harm_all, Grid, GridFunction, HarmonicCoeffs};

pub const RING_RADIUS: f64 = 0.1;
pub const RING_SIZE: usize = 16;

/// Laurent data of a function on a circle around `center`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LaurentFit {
    pub center: Complex64,
    pub radius: f64,
    /// `a₋₁`.
    pub residue: Complex64,
    /// `a₀`.
    pub regular_value: Complex64,
    pub ring_size: usize,
    /// `|a₋₂| / (r |a₋₁|)`: size of the second polar mode relative to the
    /// first; small for a simple pole at the center.
    pub condition: f64,
    /// `a₋₂`.
    pub second_order: Complex64,
}

impl LaurentFit {
    /// Pole position implied by `a₋₁/(z−c) + a₋₂/(z−c)²` for a simple pole
    /// slightly off the center.
    pub fn pole_location(&self) -> Complex64 {
        self.center + self.second_order / self.residue
    }
}

/// Trapezoid-rule Laurent coefficients of `f` on the circle `|z − c| = r`
/// with `m` equispaced samples.
pub fn residue_ring<F>(mut f: F, center: Complex64, radius: f64, m: usize) -> Result<LaurentFit>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    if m < 8 {
        return Err(Error::InvalidArgument(format!("ring size must be >= 8, got {m}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("ring radius must be positive, got {radius}")));
    }
    let zero = Complex64::new(0.0, 0.0);
    let (mut a1, mut a0, mut a2) = (zero, zero, zero);
    for j in 0..m {
        let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
        let v = f(center + e * radius)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite("ring sample"));
        }
        a0 += v;
        a1 += v * e * radius;
        a2 += v * e * e * (radius * radius);
    }
    let mf = m as f64;
    let (a0, a1, a2) = (a0 / mf, a1 / mf, a2 / mf);
    let condition = (a2.norm() / radius) / a1.norm().max(f64::MIN_POSITIVE);
    Ok(LaurentFit {
        center,
        radius,
        residue: a1,
        regular_value: a0,
        ring_size: m,
        condition: condition.min(f64::MAX),
        second_order: a2,
    })
}

/// Pole of `s ↦ h_s` of index `k`: `−(n−1) − 2k`.
pub fn riesz_pole(dim: Dimension, k: usize) -> f64 {
    -(dim.n() as f64 - 1.0) - 2.0 * k as f64
}

/// Pole of `α ↦ k_α` of index `k`: `−ρ − 2k`.
pub fn knapp_stein_pole(dim: Dimension, k: usize) -> f64 {
    -dim.rho() - 2.0 * k as f64
}

fn pole_check(dim: Dimension, s: Complex64) -> Result<()> {
    match near_riesz_pole(dim, s) {
        Some((pole, distance)) => Err(Error::NearPole { s, pole, distance }),
        None => Ok(()),
    }
}

/// `(h_s, f)` on `S²`. Below the convergence region the pairing is moved up
/// by `(h_s, f) = (h_{s+2}, [Δ + σ/2(σ/2+n−2)] f) / (σ(σ+n−3))`, `σ = s+2`,
/// until direct quadrature applies.
pub fn pair_hs(dim: Dimension, s: Complex64, f: &HarmonicCoeffs) -> Result<Complex64> {
    dim.require(3)?;
    pole_check(dim, s)?;
    let steps = descent_steps(dim, s, DIRECT_MARGIN);
    let shift = dim.n() as f64 - 3.0;
    let mut g = f.clone();
    let mut scale = Complex64::new(1.0, 0.0);
    for j in 1..=steps {
        let sigma = s + 2.0 * j as f64;
        if sigma.norm() < POLE_GUARD || (sigma + shift).norm() < POLE_GUARD {
            return Err(Error::DescentDenominator { s });
        }
        g = bernstein_apply(dim, sigma, &g)?;
        scale /= sigma * (sigma + shift);
    }
    let top = s + 2.0 * steps as f64;
    let e = riesz_eigenvalues_direct(dim, top, g.l_max())?;
    let comps = g.base_components();
    Ok(scale * e.iter().zip(&comps).map(|(a, b)| a * b).sum::<Complex64>())
}

/// `(h_s, f)` on `S^{n−1}` from the degree components `f_l(𝟏)`, using the
/// continued multipliers.
pub fn pair_hs_components(dim: Dimension, s: Complex64, base_components: &[Complex64]) -> Result<Complex64> {
    if base_components.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let e = riesz_multipliers(dim, s, base_components.len() - 1, DIRECT_MARGIN)?;
    Ok(e.iter().zip(base_components).map(|(a, b)| a * b).sum())
}

/// Ring fit of `s ↦ (h_s, f)` around `s = −(n−1) − 2k`.
pub fn residue_pair_hs(dim: Dimension, k: usize, f: &HarmonicCoeffs, radius: f64, ring_size: usize) -> Result<LaurentFit> {
    let c = Complex64::new(riesz_pole(dim, k), 0.0);
    residue_ring(|s| pair_hs(dim, s, f), c, radius, ring_size)
}

/// `∬ f₁(x) f₂(y) |x−y|^{−ρ+α} dσ dσ = Σ_l e_l(α) B_l(f₁, f₂)`.
pub fn pair_kalpha(dim: Dimension, alpha: Complex64, f1: &HarmonicCoeffs, f2: &HarmonicCoeffs) -> Result<Complex64> {
    dim.require(3)?;
    let b = f1.degree_pairing(f2);
    let e = knapp_stein_multipliers(dim, alpha, b.len() - 1, DIRECT_MARGIN)?;
    Ok(e.iter().zip(&b).map(|(a, b)| a * b).sum())
}

/// Zonal spectrum of a two-point function on a grid:
/// `D_l = Σ_m ∬ Φ(x,y) Y_lm(x) conj(Y_lm(y)) dσ(x) dσ(y)`, so that
/// `∬ Φ(x,y) k(x,y) = Σ_l e_l D_l` for a zonal kernel `k`.
#[derive(Clone, Debug, Serialize)]
pub struct TwoPointSpectrum {
    pub values: Vec<Complex64>,
}

impl TwoPointSpectrum {
    /// `Φ` given row-major: `phi[i * N + j] = Φ(x_i, y_j)` over grid nodes.
    pub fn from_samples(grid: &Arc<Grid>, phi: &[Complex64]) -> Result<Self> {
        let n = grid.len();
        if phi.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: phi.len() });
        }
        let l_max = grid.l_max();
        let mut d = vec![Complex64::new(0.0, 0.0); l_max + 1];
        let w = grid.weights();
        let pts = grid.points();
        for i in 0..n {
            let row = GridFunction::new(grid.clone(), phi[i * n..(i + 1) * n].to_vec())?;
            let c = sht_forward(&row);
            let y = sph_harm_all(l_max, pts[i]);
            for (l, dl) in d.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for idx in l * l..(l + 1) * (l + 1) {
                    acc += y[idx] * c.as_slice()[idx];
                }
                *dl += acc * w[i];
            }
        }
        Ok(TwoPointSpectrum { values: d })
    }

    /// `Σ_l mult[l] D_l`.
    pub fn contract(&self, mult: &[Complex64]) -> Complex64 {
        self.values.iter().zip(mult).map(|(a, b)| a * b).sum()
    }

    /// `∬ Φ k_α` with the continued Knapp–Stein eigenvalues.
    pub fn pair_kalpha(&self, dim: Dimension, alpha: Complex64) -> Result<Complex64> {
        let e = knapp_stein_multipliers(dim, alpha, self.values.len() - 1, DIRECT_MARGIN)?;
        Ok(self.contract(&e))
    }
}

/// Which variable carries `R_k` in the residue of `(k_α, f₁⊗f₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    First,
    Second,
}

/// `∫ (R_k f₁) f₂ dσ` or `∫ f₁ (R_k f₂) dσ`.
pub fn residue_operator_pairing(dim: Dimension, k: usize, f1: &HarmonicCoeffs, f2: &HarmonicCoeffs, slot: Slot) -> Result<Complex64> {
    let (a, b) = match slot {
        Slot::First => (residue_operator_apply(dim, k, f1)?, f2.clone()),
        Slot::Second => (f1.clone(), residue_operator_apply(dim, k, f2)?),
    };
    Ok(a.degree_pairing(&b).iter().sum())
}

/// Ring fit of `α ↦ (k_α, f₁⊗f₂)` around `α = −ρ − 2k`.
pub fn residue_pair_kalpha(
    dim: Dimension,
    k: usize,
    f1: &HarmonicCoeffs,
    f2: &HarmonicCoeffs,
    radius: f64,
    ring_size: usize,
) -> Result<LaurentFit> {
    let c = Complex64::new(knapp_stein_pole(dim, k), 0.0);
    residue_ring(|a| pair_kalpha(dim, a, f1, f2), c, radius, ring_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;
    use crate::spectral_ops::gjms_constant;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn ring_on_simple_functions() {
        let z0 = Complex64::new(0.3, -0.2);
        let fit = residue_ring(|z| Ok(1.0 / (z - z0)), z0, 0.1, 16).unwrap();
        assert!((fit.residue - 1.0).norm() < 1e-10);
        let fit = residue_ring(|z| Ok(1.0 / (z - z0) + 5.0), z0, 0.1, 16).unwrap();
        assert!((fit.residue - 1.0).norm() < 1e-10 && (fit.regular_value - 5.0).norm() < 1e-10);
        assert!(fit.condition < 1e-10);
        let fit = residue_ring(|z| Ok(gamma(z)), c(0.0), 0.1, 16).unwrap();
        assert!((fit.residue - 1.0).norm() < 1e-8);
        // off-centre pole
        let p = Complex64::new(0.01, 0.0);
        let fit = residue_ring(|z| Ok(2.0 / (z - p)), c(0.0), 0.1, 32).unwrap();
        assert!((fit.pole_location() - p).norm() < 1e-5);
        assert!(residue_ring(|z| Ok(z), c(0.0), 0.1, 4).is_err());
        assert!(residue_ring(|_| Ok(c(f64::NAN)), c(0.0), 0.1, 8).is_err());
    }

    #[test]
    fn pair_hs_constants() {
        let d3 = Dimension::three();
        let one = HarmonicCoeffs::constant(3, c(1.0));
        assert!((pair_hs(d3, c(0.0), &one).unwrap() - 4.0 * PI).norm() < 1e-12);
        assert!((pair_hs(d3, c(2.0), &one).unwrap() - 8.0 * PI).norm() < 1e-12);
        assert!(matches!(pair_hs(d3, c(-2.0), &one), Err(Error::NearPole { .. })));
    }

    #[test]
    fn literal_descent_matches_multiplier_path() {
        let d3 = Dimension::three();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = HarmonicCoeffs::random(8, &mut rng, false);
        for s in [Complex64::new(-3.1, 0.4), Complex64::new(-5.5, -0.2), c(1.2)] {
            let a = pair_hs(d3, s, &f).unwrap();
            let b = pair_hs_components(d3, s, &f.base_components()).unwrap();
            assert!((a - b).norm() < 1e-10 * a.norm(), "{s}");
        }
    }

    #[test]
    fn pole_localization() {
        // simple poles at −2, −4; regular at −3, −5
        let d3 = Dimension::three();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = HarmonicCoeffs::random(6, &mut rng, true);
        let scale = f.norm_l2();
        for (center, pole) in [(-2.0, true), (-4.0, true), (-3.0, false), (-5.0, false)] {
            let fit = residue_ring(|s| pair_hs(d3, s, &f), c(center), 0.1, 16).unwrap();
            if pole {
                assert!(fit.residue.norm() > 1e-3 * scale);
            } else {
                assert!(fit.residue.norm() <= 1e-6 * scale, "{center}: {}", fit.residue);
            }
        }
    }

    #[test]
    fn residue_in_s_is_twice_c0_f_at_base() {
        // Res_{s=−2} (h_s, f) = 2 c₀ f(𝟏) in the variable s
        let d3 = Dimension::three();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = HarmonicCoeffs::random(6, &mut rng, false);
        let fit = residue_pair_hs(d3, 0, &f, RING_RADIUS, RING_SIZE).unwrap();
        let expect = f.base_value() * (2.0 * gjms_constant(d3, 0).c_k);
        assert!((fit.residue - expect).norm() < 1e-8 * expect.norm());
    }

    #[test]
    fn kalpha_constants() {
        let d3 = Dimension::three();
        let one = HarmonicCoeffs::constant(2, c(1.0));
        let alpha = Complex64::new(0.7, 0.2);
        let v = pair_kalpha(d3, alpha, &one, &one).unwrap();
        let e0 = ((alpha + 2.0) * 2f64.ln()).exp() * PI / (alpha + 1.0);
        assert!((v - e0 * 4.0 * PI).norm() < 1e-11 * v.norm());
    }

    #[test]
    fn remark_two_symmetry() {
        let d3 = Dimension::three();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f1 = HarmonicCoeffs::random(7, &mut rng, false);
        let f2 = HarmonicCoeffs::random(7, &mut rng, false);
        for k in 0..3 {
            let a = residue_operator_pairing(d3, k, &f1, &f2, Slot::First).unwrap();
            let b = residue_operator_pairing(d3, k, &f1, &f2, Slot::Second).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn two_point_spectrum_matches_product_form() {
        let d3 = Dimension::three();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let grid = Grid::new(10).unwrap();
        let f1 = HarmonicCoeffs::random(4, &mut rng, false);
        let f2 = HarmonicCoeffs::random(4, &mut rng, false);
        let a = crate::sphgrid::sht_inverse(&f1, &grid).into_values();
        let b = crate::sphgrid::sht_inverse(&f2, &grid).into_values();
        let n = grid.len();
        let mut phi = vec![c(0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                phi[i * n + j] = a[i] * b[j];
            }
        }
        let spec = TwoPointSpectrum::from_samples(&grid, &phi).unwrap();
        let alpha = Complex64::new(-2.5, 0.3);
        let x = spec.pair_kalpha(d3, alpha).unwrap();
        let y = pair_kalpha(d3, alpha, &f1, &f2).unwrap();
        assert!((x - y).norm() < 1e-10 * y.norm());
    }
}
