//! Pointwise checks of the two identities behind the invariance and the
//! continuation of `𝒯_k`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lorentz::{ConformalMap, Dimension};
use crate::reps::{real_pow, PrincipalSeries, RepParameter, SphereFunction};
use crate::spectral_ops::laplacian_multiplier;
use crate::sphgrid::{sht_forward, Grid, GridFunction, HarmonicCoeffs};

fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn powc(r: f64, s: Complex64) -> Complex64 {
    if r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        (s * r.ln()).exp()
    }
}

/// The value of `λ₁` forced by `α₃ = −ρ−2k`: `−k − ρ/2 + α₂/2`.
pub fn astuce_lambda1(dim: Dimension, k: usize, alpha2: Complex64) -> Complex64 {
    alpha2 * 0.5 - k as f64 - dim.rho() * 0.5
}

/// Relative sup-norm defect over the nodes of `grid` of
/// `F_{x₃}[π_{λ₁}(g)f₁] = κ(g,y₃)^{−ρ/2+α₂/2} π_{−k}(g) F_{y₃}[f₁]`,
/// where `F_z[f](x) = f(x)|z−x|^{−ρ+α₂}` and `x₃ = g(y₃)`.
#[allow(clippy::too_many_arguments)]
pub fn lemma_astuce_defect(
    dim: Dimension,
    k: usize,
    lambda1: Complex64,
    alpha2: Complex64,
    g: &ConformalMap,
    f1: &dyn SphereFunction,
    x3: [f64; 3],
    grid: &std::sync::Arc<Grid>,
) -> Result<f64> {
    dim.require(3)?;
    let pinned = astuce_lambda1(dim, k, alpha2);
    if (lambda1 - pinned).norm() > 1e-12 * (1.0 + pinned.norm()) {
        return Err(Error::InvalidArgument(format!(
            "λ₁ = {lambda1} is inconsistent with α₂ = {alpha2}, k = {k}: the exponents match only for λ₁ = {pinned}"
        )));
    }
    let rho = dim.rho();
    let s2 = alpha2 - rho;
    let g_inv = g.inverse();
    let (y3, _) = g_inv.act3(x3);
    let (_, kappa_y3) = g.act3(y3);
    let prefactor = real_pow(kappa_y3, (alpha2 - rho) * 0.5);
    let moved = PrincipalSeries::new(RepParameter::new(lambda1), g, f1)?;
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for x in grid.points() {
        let lhs = moved.eval(x) * powc(distance(x3, x), s2);
        let (gx, kappa) = g_inv.act3(x);
        let rhs = prefactor * real_pow(kappa, Complex64::new(rho - k as f64, 0.0)) * f1.eval(gx) * powc(distance(y3, gx), s2);
        worst = worst.max((lhs - rhs).norm());
        scale = scale.max(lhs.norm());
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

/// Pieces of `ψ(x,y,s)` in `Δ_x[|x−y|^s φ] = |x−y|^{s−2} ψ` on `S²`.
#[derive(Clone, Copy, Debug)]
pub struct DerkerTerms {
    /// `(−(s/2)(s/2+n−2)|x−y|² + s(s+n−3)) φ`.
    pub bernstein: Complex64,
    /// `s grad_x|x−y|² · grad φ`.
    pub gradient: Complex64,
    /// `|x−y|² Δφ`.
    pub laplacian: Complex64,
}

impl DerkerTerms {
    pub fn psi(&self) -> Complex64 {
        self.bernstein + self.gradient + self.laplacian
    }

    fn magnitude(&self) -> f64 {
        self.bernstein.norm() + self.gradient.norm() + self.laplacian.norm()
    }
}

/// `ψ` from the product rule, with `phi` the coefficients of `φ(·, y)`.
pub fn derker_terms(s: Complex64, phi: &HarmonicCoeffs, x: [f64; 3], y: [f64; 3]) -> DerkerTerms {
    let dim = Dimension::three();
    let n = dim.n() as f64;
    let r2 = distance(x, y).powi(2);
    let h = s * 0.5;
    let b = -h * (h + n - 2.0) * r2 + s * (s + n - 3.0);
    // grad_x |x−y|² = −2 (y − ⟨x,y⟩ x)
    let t = dot(x, y);
    let grad_r2 = [-2.0 * (y[0] - t * x[0]), -2.0 * (y[1] - t * x[1]), -2.0 * (y[2] - t * x[2])];
    let gphi = phi.gradient_at(x);
    let cross: Complex64 = (0..3).map(|i| gphi[i] * grad_r2[i]).sum();
    let lap: Vec<Complex64> = (0..=phi.l_max()).map(|l| Complex64::new(laplacian_multiplier(dim, l), 0.0)).collect();
    let lap_phi = phi.apply_degree_multiplier(&lap).expect("multiplier length matches").eval_at(x);
    DerkerTerms { bernstein: b * phi.eval_at(x), gradient: s * cross, laplacian: r2 * lap_phi }
}

/// `|Δ_x[|x−y|^s φ](x) − |x−y|^{s−2} ψ| / (|x−y|^{Re s−2} Σ|ψ terms|)`, where the
/// left side is computed spectrally at degree `l_max`.
pub fn derker_split_defect(s: Complex64, phi: &HarmonicCoeffs, x: [f64; 3], y: [f64; 3], l_max: usize) -> Result<f64> {
    let r = distance(x, y);
    if r < 1e-8 {
        return Err(Error::InvalidArgument("x and y must be distinct".into()));
    }
    let grid = Grid::new(l_max)?;
    let samples = GridFunction::from_fn(grid.clone(), |z| powc(distance(z, y), s) * phi.eval_at(z))?;
    let c = sht_forward(&samples);
    let dim = Dimension::three();
    let lap: Vec<Complex64> = (0..=l_max).map(|l| Complex64::new(laplacian_multiplier(dim, l), 0.0)).collect();
    let lhs = c.apply_degree_multiplier(&lap)?.eval_at(x);
    let terms = derker_terms(s, phi, x, y);
    let base = powc(r, s - 2.0);
    let rhs = base * terms.psi();
    let scale = r.powf(s.re - 2.0) * terms.magnitude();
    Ok((lhs - rhs).norm() / scale)
}

/// The case `φ ≡ 1`: `[Δ_x + (s/2)(s/2+1)] |x−y|^s = s² |x−y|^{s−2}` pointwise.
pub fn bernstein_kernel_defect(s: Complex64, x: [f64; 3], y: [f64; 3], l_max: usize) -> Result<f64> {
    derker_split_defect(s, &HarmonicCoeffs::constant(0, Complex64::new(1.0, 0.0)), x, y, l_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::SpherePoint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn astuce_cases() {
        let d = Dimension::three();
        let grid = Grid::with_sizes(12, 24).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = HarmonicCoeffs::random(5, &mut rng, false);
        let a2 = Complex64::new(4.0, 0.0);
        let l1 = astuce_lambda1(d, 1, a2);
        let x3 = SpherePoint::random(d, &mut rng).as3();
        let id = ConformalMap::identity(d);
        assert_eq!(lemma_astuce_defect(d, 1, l1, a2, &id, &f, x3, &grid).unwrap(), 0.0);
        let rot = ConformalMap::random_rotation(d, &mut rng);
        assert!(lemma_astuce_defect(d, 1, l1, a2, &rot, &f, x3, &grid).unwrap() < 1e-10);
        let boost = ConformalMap::boost(0.3, d);
        assert!(lemma_astuce_defect(d, 1, l1, a2, &boost, &f, x3, &grid).unwrap() < 1e-8);
        // any other λ₁ breaks the exponent identity
        assert!(lemma_astuce_defect(d, 1, l1 + 0.1, a2, &boost, &f, x3, &grid).is_err());
    }

    #[test]
    fn derker_polynomial_case_is_exact() {
        let x = [0.6, 0.0, 0.8];
        let y = [0.0, 1.0, 0.0];
        let phi = HarmonicCoeffs::single(1, 1, 0);
        let d = derker_split_defect(Complex64::new(6.0, 0.0), &phi, x, y, 48).unwrap();
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn bernstein_antipodal() {
        let x = [1.0, 0.0, 0.0];
        let d = bernstein_kernel_defect(Complex64::new(4.7, 0.3), x, [-1.0, 0.0, 0.0], 64).unwrap();
        assert!(d < 1e-6, "{d}");
    }
}
