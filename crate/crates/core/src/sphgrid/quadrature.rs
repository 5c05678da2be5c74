//! One-dimensional rules on `[−1, 1]`: Gauss–Legendre, Gauss–Jacobi
//! (Golub–Welsch) and a double-exponential rule for integrands with
//! algebraic endpoint singularities of complex order.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes (ascending) and weights.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
            let dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        // final derivative at the converged node
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = if n > 1 { nf * (x * p1 - p0) / (x * x - 1.0) } else { 1.0 };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    (nodes, weights)
}

/// Gauss–Jacobi rule for the weight `(1−t)^a (1+t)^b`, with weights
/// normalised to sum to one (multiply by the weight's total mass).
pub fn gauss_jacobi_normalized(n: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(a > -1.0 && b > -1.0) || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "Gauss-Jacobi needs n >= 1, a, b > -1 (got n={n}, a={a}, b={b})"
        )));
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    let ab = a + b;
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jac[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + ab;
            let beta2 = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * j * (j + a) * (j + b) * (j + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = beta2.sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok((
        pairs.iter().map(|p| p.0).collect(),
        pairs.iter().map(|p| p.1 / total).collect(),
    ))
}

/// Result of a double-exponential integration.
#[derive(Clone, Copy, Debug)]
pub struct DeEstimate {
    pub value: Complex64,
    /// Σ |w f|, the scale against which rounding is judged.
    pub abs_scale: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Tanh–sinh quadrature of `∫_{−1}^{1} f`.
///
/// `f(t, 1−t, 1+t)` receives both endpoint distances computed without
/// cancellation, so factors like `(1−t)^σ` with complex `σ` stay accurate
/// next to the endpoint. Levels are refined until two successive estimates
/// agree to `rel_tol` (or to the rounding floor set by `Σ|w f|`).
pub fn tanh_sinh<F>(mut f: F, rel_tol: f64) -> Result<DeEstimate>
where
    F: FnMut(f64, f64, f64) -> Complex64,
{
    let r = tanh_sinh_vec(1, |t, om, op, out| out[0] = f(t, om, op), rel_tol)?;
    Ok(DeEstimate {
        value: r.values[0],
        abs_scale: r.abs_scales[0],
        error_estimate: r.errors[0],
        evaluations: r.evaluations,
    })
}

/// Componentwise result of [`tanh_sinh_vec`].
#[derive(Clone, Debug)]
pub struct DeVecEstimate {
    pub values: Vec<Complex64>,
    pub abs_scales: Vec<f64>,
    pub errors: Vec<f64>,
    pub evaluations: usize,
}

/// Vector-valued tanh–sinh: `f(t, 1−t, 1+t, out)` fills `len` integrands at
/// once and every component must meet the stopping rule.
pub fn tanh_sinh_vec<F>(len: usize, mut f: F, rel_tol: f64) -> Result<DeVecEstimate>
where
    F: FnMut(f64, f64, f64, &mut [Complex64]),
{
    const MAX_LEVEL: u32 = 12;
    // |u| beyond this puts 1 − |t| below ~1e-300
    const U_MAX: f64 = 6.0;

    let zero = Complex64::new(0.0, 0.0);
    let mut sum = vec![zero; len];
    let mut abs_sum = vec![0.0; len];
    let mut scratch = vec![zero; len];
    let mut evaluations = 0usize;

    let mut add_node = |u: f64, sum: &mut [Complex64], abs_sum: &mut [f64]| -> Result<()> {
        let x = FRAC_PI_2 * u.sinh();
        let ch = x.cosh();
        // 1 − tanh x = e^{−x}/cosh x, written for either sign of u
        let (one_minus, one_plus) = if x >= 0.0 {
            let d = (-x).exp() / ch;
            (d, 2.0 - d)
        } else {
            let d = x.exp() / ch;
            (2.0 - d, d)
        };
        let w = FRAC_PI_2 * u.cosh() / (ch * ch);
        if w == 0.0 || one_minus == 0.0 || one_plus == 0.0 {
            return Ok(());
        }
        scratch.iter_mut().for_each(|v| *v = zero);
        f(x.tanh(), one_minus, one_plus, &mut scratch);
        evaluations += 1;
        for ((s, a), v) in sum.iter_mut().zip(abs_sum.iter_mut()).zip(&scratch) {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite("tanh-sinh integrand"));
            }
            *s += v * w;
            *a += v.norm() * w;
        }
        Ok(())
    };

    let mut h = 1.0;
    add_node(0.0, &mut sum, &mut abs_sum)?;
    let mut k = 1usize;
    while k as f64 * h <= U_MAX {
        add_node(k as f64 * h, &mut sum, &mut abs_sum)?;
        add_node(-(k as f64) * h, &mut sum, &mut abs_sum)?;
        k += 1;
    }
    let mut estimate: Vec<Complex64> = sum.iter().map(|v| v * h).collect();
    let mut errors = vec![f64::INFINITY; len];
    for level in 1..=MAX_LEVEL {
        h /= 2.0;
        let mut k = 1usize;
        while k as f64 * h <= U_MAX {
            add_node(k as f64 * h, &mut sum, &mut abs_sum)?;
            add_node(-(k as f64) * h, &mut sum, &mut abs_sum)?;
            k += 2;
        }
        let mut done = level >= 3;
        for j in 0..len {
            let next = sum[j] * h;
            errors[j] = (next - estimate[j]).norm();
            estimate[j] = next;
            let floor = 64.0 * f64::EPSILON * abs_sum[j] * h;
            if !(errors[j] <= rel_tol * next.norm() || errors[j] <= floor) {
                done = false;
            }
        }
        if done {
            break;
        }
        if level == MAX_LEVEL {
            let worst = (0..len)
                .map(|j| errors[j] / (abs_sum[j] * h).max(estimate[j].norm()).max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max);
            if worst > 1e-8 {
                return Err(Error::Quadrature(format!(
                    "tanh-sinh stalled with relative error {worst:e}"
                )));
            }
        }
    }
    Ok(DeVecEstimate {
        values: estimate,
        abs_scales: abs_sum.iter().map(|a| a * h).collect(),
        errors,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1usize, 2, 5, 24, 97] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for deg in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(t, wi)| wi * t.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn gauss_jacobi_moments() {
        // ∫ (1-t)(1+t) t^2 dt = 4/15, total mass 4/3
        let (x, w) = gauss_jacobi_normalized(6, 1.0, 1.0).unwrap();
        let q: f64 = x.iter().zip(&w).map(|(t, wi)| wi * t * t).sum::<f64>() * (4.0 / 3.0);
        assert!((q - 4.0 / 15.0).abs() < 1e-14);
        // Chebyshev weight: nodes cos((2i+1)π/2n)
        let (x, _) = gauss_jacobi_normalized(5, -0.5, -0.5).unwrap();
        for (i, t) in x.iter().rev().enumerate() {
            let e = ((2 * i + 1) as f64 * std::f64::consts::PI / 10.0).cos();
            assert!((t - e).abs() < 1e-13);
        }
        assert!(gauss_jacobi_normalized(4, -1.5, 0.0).is_err());
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // ∫ (1-t)^{-0.7} dt = 2^{0.3}/0.3
        let r = tanh_sinh(|_, om, _| Complex64::new(om.powf(-0.7), 0.0), 1e-14).unwrap();
        let exact = 2f64.powf(0.3) / 0.3;
        assert!((r.value.re - exact).abs() < 1e-12 * exact, "{}", r.value);
        // complex exponent: ∫ (1-t)^σ dt = 2^{σ+1}/(σ+1)
        let sigma = Complex64::new(-0.6, 0.4);
        let r = tanh_sinh(|_, om, _| (sigma * om.ln()).exp(), 1e-14).unwrap();
        let exact = ((sigma + 1.0) * 2f64.ln()).exp() / (sigma + 1.0);
        assert!((r.value - exact).norm() < 1e-12 * exact.norm());
    }

    #[test]
    fn tanh_sinh_rejects_nan() {
        assert!(tanh_sinh(|_, _, _| Complex64::new(f64::NAN, 0.0), 1e-10).is_err());
    }
}
