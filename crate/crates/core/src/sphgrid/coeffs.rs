use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::harmonics::{lm_count, lm_index, sph_harm_all};
use crate::error::{Error, Result};

/// Spherical-harmonic coefficients `c_lm`, `0 ≤ l ≤ L`, `|m| ≤ l`, of a
/// function on `S²`: `f = Σ c_lm Y_lm`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicCoeffs {
    l_max: usize,
    c: Vec<Complex64>,
}

impl HarmonicCoeffs {
    pub fn zeros(l_max: usize) -> Self {
        HarmonicCoeffs { l_max, c: vec![Complex64::new(0.0, 0.0); lm_count(l_max)] }
    }

    pub fn from_vec(l_max: usize, c: Vec<Complex64>) -> Result<Self> {
        if c.len() != lm_count(l_max) {
            return Err(Error::DimensionMismatch { expected: lm_count(l_max), actual: c.len() });
        }
        if c.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite("harmonic coefficients"));
        }
        Ok(HarmonicCoeffs { l_max, c })
    }

    /// The constant function `value`.
    pub fn constant(l_max: usize, value: Complex64) -> Self {
        let mut out = Self::zeros(l_max);
        out.c[0] = value * (4.0 * PI).sqrt();
        out
    }

    /// A single harmonic `Y_lm`.
    pub fn single(l_max: usize, l: usize, m: i64) -> Self {
        let mut out = Self::zeros(l_max.max(l));
        out.set(l, m, Complex64::new(1.0, 0.0));
        out
    }

    /// Gaussian coefficients with standard deviation `1/(1+l)`; with
    /// `real = true` the symmetry `c_{l,−m} = (−1)^m conj(c_lm)` is imposed.
    pub fn random<R: Rng + ?Sized>(l_max: usize, rng: &mut R, real: bool) -> Self {
        let mut out = Self::zeros(l_max);
        for l in 0..=l_max {
            let sd = 1.0 / (1.0 + l as f64);
            for m in -(l as i64)..=(l as i64) {
                if real && m < 0 {
                    continue;
                }
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let mut v = Complex64::new(re, im) * sd;
                if real && m == 0 {
                    v = Complex64::new(v.re, 0.0);
                }
                out.set(l, m, v);
                if real && m > 0 {
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    out.set(l, -m, v.conj() * sign);
                }
            }
        }
        out
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.c
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.c
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        if l > self.l_max || m.unsigned_abs() as usize > l {
            return Complex64::new(0.0, 0.0);
        }
        self.c[lm_index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, v: Complex64) {
        assert!(l <= self.l_max && m.unsigned_abs() as usize <= l, "(l, m) out of range");
        self.c[lm_index(l, m)] = v;
    }

    /// Whether the coefficients describe a real-valued function.
    pub fn is_real(&self, tol: f64) -> bool {
        let scale = self.norm_l2().max(1.0);
        (0..=self.l_max).all(|l| {
            (0..=l as i64).all(|m| {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                (self.get(l, -m) - self.get(l, m).conj() * sign).norm() <= tol * scale
            })
        })
    }

    /// Truncated or zero-padded copy at degree `l_max`.
    pub fn resized(&self, l_max: usize) -> Self {
        let mut out = Self::zeros(l_max);
        let n = lm_count(l_max.min(self.l_max));
        out.c[..n].copy_from_slice(&self.c[..n]);
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        HarmonicCoeffs { l_max: self.l_max, c: self.c.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let l = self.l_max.max(other.l_max);
        let mut out = self.resized(l);
        for (i, v) in other.c.iter().enumerate() {
            out.c[i] += v;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Multiplies the degree-`l` block by `values[l]`.
    pub fn apply_degree_multiplier(&self, values: &[Complex64]) -> Result<Self> {
        if values.len() <= self.l_max {
            return Err(Error::DimensionMismatch { expected: self.l_max + 1, actual: values.len() });
        }
        let mut out = self.clone();
        for l in 0..=self.l_max {
            for v in &mut out.c[l * l..(l + 1) * (l + 1)] {
                *v *= values[l];
            }
        }
        Ok(out)
    }

    /// Coefficients of the complex conjugate function.
    pub fn conj_fn(&self) -> Self {
        let mut out = Self::zeros(self.l_max);
        for l in 0..=self.l_max {
            for m in -(l as i64)..=(l as i64) {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                out.set(l, m, self.get(l, -m).conj() * sign);
            }
        }
        out
    }

    /// `‖f‖₂² = Σ |c_lm|²`.
    pub fn norm_l2(&self) -> f64 {
        self.c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian product `∫ f conj(g) dσ = Σ c_lm conj(d_lm)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.c.iter().zip(&other.c).map(|(a, b)| a * b.conj()).sum()
    }

    /// Per-degree bilinear pairing `B_l = Σ_m ∫f Y_lm dσ · ∫g conj(Y_lm) dσ`,
    /// so that `∬ f(x) g(y) Σ_l e_l Z_l(x,y) = Σ_l e_l B_l` for a zonal kernel
    /// with Funk–Hecke eigenvalues `e_l`.
    pub fn degree_pairing(&self, other: &Self) -> Vec<Complex64> {
        let l_max = self.l_max.min(other.l_max);
        (0..=l_max)
            .map(|l| {
                (-(l as i64)..=(l as i64))
                    .map(|m| {
                        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                        self.get(l, -m) * other.get(l, m) * sign
                    })
                    .sum()
            })
            .collect()
    }

    /// `f(x)` by direct synthesis.
    pub fn eval_at(&self, x: [f64; 3]) -> Complex64 {
        let y = sph_harm_all(self.l_max, x);
        self.c.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    /// Degree components `f_l(𝟏)` at the base point; they sum to `f(𝟏)`.
    pub fn base_components(&self) -> Vec<Complex64> {
        (0..=self.l_max)
            .map(|l| self.get(l, 0) * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt())
            .collect()
    }

    /// `f(𝟏)`.
    pub fn base_value(&self) -> Complex64 {
        self.base_components().iter().sum()
    }

    /// Components of the angular momentum `L f = −i x × ∇f`, ordered along
    /// `(x₁, x₂, x₃)`.
    pub fn angular_momentum(&self) -> [HarmonicCoeffs; 3] {
        let l_max = self.l_max;
        let mut lz = Self::zeros(l_max);
        let mut lp = Self::zeros(l_max);
        let mut lm = Self::zeros(l_max);
        for l in 0..=l_max {
            let li = l as i64;
            for m in -li..=li {
                lz.set(l, m, self.get(l, m) * m as f64);
                if m > -li {
                    let f = ((li - m + 1) * (li + m)) as f64;
                    lp.set(l, m, self.get(l, m - 1) * f.sqrt());
                }
                if m < li {
                    let f = ((li + m + 1) * (li - m)) as f64;
                    lm.set(l, m, self.get(l, m + 1) * f.sqrt());
                }
            }
        }
        let half = Complex64::new(0.5, 0.0);
        let lx = lp.add(&lm).scale(half);
        let ly = lp.sub(&lm).scale(Complex64::new(0.0, -0.5));
        // frame (X, Y, Z) = (x₂, x₃, x₁)
        [lz, lx, ly]
    }

    /// Surface gradient `∇_S f(x) = −i x × (L f)(x)`.
    pub fn gradient_at(&self, x: [f64; 3]) -> [Complex64; 3] {
        let l = self.angular_momentum();
        let v = [l[0].eval_at(x), l[1].eval_at(x), l[2].eval_at(x)];
        gradient_from_momentum(x, v)
    }
}

/// `−i x × v`.
pub fn gradient_from_momentum(x: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    let mi = Complex64::new(0.0, -1.0);
    [
        mi * (v[2] * x[1] - v[1] * x[2]),
        mi * (v[0] * x[2] - v[2] * x[0]),
        mi * (v[1] * x[0] - v[0] * x[1]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_and_base_value() {
        let c = HarmonicCoeffs::constant(4, Complex64::new(2.5, -1.0));
        assert!((c.eval_at([0.0, 0.6, 0.8]) - Complex64::new(2.5, -1.0)).norm() < 1e-14);
        assert!((c.base_value() - Complex64::new(2.5, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn base_value_matches_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = HarmonicCoeffs::random(9, &mut rng, false);
        assert!((f.base_value() - f.eval_at([1.0, 0.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn real_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = HarmonicCoeffs::random(7, &mut rng, true);
        assert!(f.is_real(1e-14));
        assert!(f.eval_at([0.2, -0.3, (1.0f64 - 0.13).sqrt()]).im.abs() < 1e-13);
        let g = HarmonicCoeffs::random(7, &mut rng, false);
        assert!(!g.is_real(1e-6));
        let x = [0.6, 0.0, 0.8];
        assert!((g.conj_fn().eval_at(x) - g.eval_at(x).conj()).norm() < 1e-13);
    }

    #[test]
    fn gradient_of_coordinate() {
        // x₁ = √(4π/3) Y₁₀, ∇_S x₁ = e₁ − x₁ x
        let f = HarmonicCoeffs::single(1, 1, 0).scale(Complex64::new((4.0 * PI / 3.0).sqrt(), 0.0));
        let x = [0.36, 0.48, 0.8];
        let g = f.gradient_at(x);
        let e = [1.0 - x[0] * x[0], -x[0] * x[1], -x[0] * x[2]];
        for k in 0..3 {
            assert!((g[k] - e[k]).norm() < 1e-14, "{k}: {} vs {}", g[k], e[k]);
        }
    }

    #[test]
    fn gradient_of_transverse_coordinates() {
        // x₂ + i x₃ = −√(8π/3) Y₁₁
        let f = HarmonicCoeffs::single(1, 1, 1).scale(Complex64::new(-(8.0 * PI / 3.0).sqrt(), 0.0));
        let x = [0.36, 0.48, 0.8];
        assert!((f.eval_at(x) - Complex64::new(x[1], x[2])).norm() < 1e-14);
        let g = f.gradient_at(x);
        let i = Complex64::new(0.0, 1.0);
        let v = x[1] + i * x[2];
        let e = [-x[0] * v, 1.0 - x[1] * v, i - x[2] * v];
        for k in 0..3 {
            assert!((g[k] - e[k]).norm() < 1e-14, "{k}");
        }
    }

    #[test]
    fn degree_pairing_of_harmonics() {
        let f = HarmonicCoeffs::single(3, 2, 1);
        let g = f.conj_fn();
        // ∫ Y conj(Y) = 1
        let b = g.degree_pairing(&f);
        assert!((b[2] - 1.0).norm() < 1e-14);
        assert!(b[1].norm() < 1e-14);
    }

    #[test]
    fn multiplier_shape_checked() {
        let f = HarmonicCoeffs::zeros(3);
        assert!(f.apply_degree_multiplier(&[Complex64::new(1.0, 0.0); 3]).is_err());
        assert!(HarmonicCoeffs::from_vec(2, vec![Complex64::new(0.0, 0.0); 8]).is_err());
    }
}
