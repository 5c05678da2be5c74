//! Analysis and synthesis between grid samples and harmonic coefficients.
//!
//! The `φ` direction goes through an FFT per latitude; the `θ` direction is
//! a direct Legendre sum against the stored table.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

use super::coeffs::{gradient_from_momentum, HarmonicCoeffs};
use super::grid::{Grid, GridFunction};
use super::harmonics::{lm_index, normalized_legendre_into, table_len};
use crate::error::{Error, Result};

/// Forward transform at the grid's own degree.
pub fn sht_forward(f: &GridFunction) -> HarmonicCoeffs {
    let l = f.grid().l_max();
    sht_forward_to(f, l).expect("grid degree is always admissible")
}

/// Forward transform truncated at degree `l_max ≤ grid.l_max()`.
pub fn sht_forward_to(f: &GridFunction, l_max: usize) -> Result<HarmonicCoeffs> {
    let grid = f.grid();
    if l_max > grid.l_max() {
        return Err(Error::InvalidDegree(format!(
            "analysis degree {l_max} exceeds grid degree {}",
            grid.l_max()
        )));
    }
    let n_phi = grid.n_phi();
    let dphi = 2.0 * PI / n_phi as f64;
    let grid_l = grid.l_max();
    let mut out = HarmonicCoeffs::zeros(l_max);
    let c = out.as_mut_slice();
    let mut buf = vec![Complex64::new(0.0, 0.0); n_phi];
    for i in 0..grid.n_theta() {
        buf.copy_from_slice(&f.values()[i * n_phi..(i + 1) * n_phi]);
        grid.fft_forward(&mut buf);
        let w = grid.theta_weights()[i] * dphi;
        let row = grid.plm_row(i);
        let mut off = 0;
        for m in 0..=l_max {
            let fp = buf[m] * w;
            let fm = buf[(n_phi - m) % n_phi] * w;
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for l in m..=l_max {
                let p = row[off + l - m];
                c[lm_index(l, m as i64)] += fp * p;
                if m > 0 {
                    c[lm_index(l, -(m as i64))] += fm * (sign * p);
                }
            }
            off += grid_l + 1 - m;
        }
    }
    Ok(out)
}

/// Samples `Σ c_lm Y_lm` on `grid`. Coefficient degrees above the grid's own
/// degree are allowed: the Legendre rows are then built on the fly.
pub fn sht_inverse(c: &HarmonicCoeffs, grid: &Arc<Grid>) -> GridFunction {
    let n_phi = grid.n_phi();
    let l_max = c.l_max();
    let (row_l, mut scratch) = if l_max > grid.l_max() {
        (l_max, vec![0.0; table_len(l_max)])
    } else {
        (grid.l_max(), Vec::new())
    };
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); n_phi];
    for i in 0..grid.n_theta() {
        let row: &[f64] = if scratch.is_empty() {
            grid.plm_row(i)
        } else {
            let ct = grid.cos_theta()[i];
            normalized_legendre_into(l_max, ct, ((1.0 - ct) * (1.0 + ct)).sqrt(), &mut scratch);
            &scratch
        };
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut off = 0;
        for m in 0..=l_max {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let mut gp = Complex64::new(0.0, 0.0);
            let mut gm = Complex64::new(0.0, 0.0);
            for l in m..=l_max {
                let p = row[off + l - m];
                gp += c.as_slice()[lm_index(l, m as i64)] * p;
                if m > 0 {
                    gm += c.as_slice()[lm_index(l, -(m as i64))] * (sign * p);
                }
            }
            buf[m % n_phi] += gp;
            if m > 0 {
                buf[(n_phi - m % n_phi) % n_phi] += gm;
            }
            off += row_l + 1 - m;
        }
        grid.fft_inverse(&mut buf);
        values[i * n_phi..(i + 1) * n_phi].copy_from_slice(&buf);
    }
    GridFunction::new(grid.clone(), values).expect("synthesis of finite coefficients")
}

/// `Σ c_lm Y_lm(x)` at arbitrary points.
pub fn synthesize_at(c: &HarmonicCoeffs, points: &[[f64; 3]]) -> Vec<Complex64> {
    points.iter().map(|x| c.eval_at(*x)).collect()
}

/// Surface gradient of a band-limited function sampled on `grid`, as three
/// grid functions along `(x₁, x₂, x₃)`.
pub fn surface_gradient_grid(c: &HarmonicCoeffs, grid: &Arc<Grid>) -> [GridFunction; 3] {
    let lmom = c.angular_momentum();
    let parts: Vec<GridFunction> = lmom.iter().map(|l| sht_inverse(l, grid)).collect();
    let pts = grid.points();
    let mut out = [
        GridFunction::zeros(grid.clone()),
        GridFunction::zeros(grid.clone()),
        GridFunction::zeros(grid.clone()),
    ];
    for (k, x) in pts.iter().enumerate() {
        let v = [parts[0].values()[k], parts[1].values()[k], parts[2].values()[k]];
        let g = gradient_from_momentum(*x, v);
        for d in 0..3 {
            out[d].values_mut()[k] = g[d];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphgrid::harmonics::sph_harm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_band_limited() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for l in [1usize, 6, 23, 40] {
            let grid = Grid::new(l).unwrap();
            let c = HarmonicCoeffs::random(l, &mut rng, false);
            let f = sht_inverse(&c, &grid);
            let back = sht_forward(&f);
            let err = back.sub(&c).norm_l2();
            assert!(err < 1e-12 * c.norm_l2(), "L={l}: {err}");
        }
    }

    #[test]
    fn single_harmonic_sample() {
        let grid = Grid::new(8).unwrap();
        let f = GridFunction::from_fn(grid, |x| sph_harm(5, -3, x)).unwrap();
        let c = sht_forward(&f);
        for l in 0..=8usize {
            for m in -(l as i64)..=(l as i64) {
                let e = if (l, m) == (5, -3) { 1.0 } else { 0.0 };
                assert!((c.get(l, m) - e).norm() < 1e-12, "({l},{m})");
            }
        }
    }

    #[test]
    fn orthonormality_on_grid() {
        let l_max = 10;
        let grid = Grid::new(l_max).unwrap();
        let pts = grid.points();
        let ys: Vec<Vec<Complex64>> =
            pts.iter().map(|x| crate::sphgrid::harmonics::sph_harm_all(l_max, *x)).collect();
        let w = grid.weights();
        let n = (l_max + 1) * (l_max + 1);
        for a in (0..n).step_by(7) {
            for b in 0..n {
                let s: Complex64 = (0..pts.len()).map(|k| ys[k][a] * ys[k][b].conj() * w[k]).sum();
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((s - e).norm() < 1e-12, "{a} {b}");
            }
        }
    }

    #[test]
    fn parseval() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let grid = Grid::new(20).unwrap();
        let c = HarmonicCoeffs::random(20, &mut rng, false);
        let f = sht_inverse(&c, &grid);
        let q = f.map(|v| Complex64::new(v.norm_sqr(), 0.0)).quad().re;
        assert!((q - c.norm_l2().powi(2)).abs() < 1e-9);
    }

    #[test]
    fn synthesis_above_grid_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let coarse = Grid::new(6).unwrap();
        let c = HarmonicCoeffs::random(15, &mut rng, false);
        let f = sht_inverse(&c, &coarse);
        let pts = coarse.points();
        let direct = synthesize_at(&c, &pts);
        for (a, b) in f.values().iter().zip(&direct) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn gradient_grid_matches_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = HarmonicCoeffs::random(6, &mut rng, false);
        let grid = Grid::new(8).unwrap();
        let g = surface_gradient_grid(&c, &grid);
        let k = 37;
        let x = grid.points()[k];
        let p = c.gradient_at(x);
        for d in 0..3 {
            assert!((g[d].values()[k] - p[d]).norm() < 1e-12);
        }
        // tangent to the sphere
        let dot: Complex64 = (0..3).map(|d| p[d] * x[d]).sum();
        assert!(dot.norm() < 1e-12);
    }
}
