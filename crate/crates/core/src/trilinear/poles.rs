//! Pole detection along real lines in parameter space, on the closed forms
//! of `𝒦_𝛂(1,1,1)` and of its residue on `α₃ = −ρ−2k`.

use num_complex::Complex64;
use serde::Serialize;

use super::closed_form::{k111_gamma_ratio, k111_residue_expression};
use crate::error::{Error, Result};
use crate::lorentz::Dimension;
use crate::mero::residue_ring;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleFamily {
    Alpha1,
    Alpha2,
    Alpha3,
    Sum,
    TkLine,
    /// Not on any plane or line of the lattice.
    Unclassified,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoleReport {
    pub family: PoleFamily,
    pub index: i64,
    pub location: String,
    /// Value of the scan variable at the pole.
    pub position: f64,
    pub residue: Complex64,
}

/// What is scanned, and along which variable `t`.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum ScanTarget {
    /// `t ↦ 𝒦(1,1,1)` at `α_slot = t`, the other two entries from `fixed` in order.
    Alpha { slot: usize, fixed: [Complex64; 2] },
    /// `t ↦ 𝒦(1,1,1)` at `(α₁, α₂, t − α₁ − α₂)`.
    Sum { alpha1: Complex64, alpha2: Complex64 },
    /// `t ↦` residue on `α₃ = −ρ−2k` at `α₁ = t/2 + offset`, `α₂ = t/2 − offset`.
    TkLine { k: usize, offset: Complex64 },
}

impl ScanTarget {
    fn alpha(&self, t: Complex64) -> [Complex64; 3] {
        match *self {
            ScanTarget::Alpha { slot, fixed } => {
                let mut a = [Complex64::new(0.0, 0.0); 3];
                let mut it = fixed.iter();
                for (j, aj) in a.iter_mut().enumerate() {
                    *aj = if j == slot { t } else { *it.next().unwrap() };
                }
                a
            }
            ScanTarget::Sum { alpha1, alpha2 } => [alpha1, alpha2, t - alpha1 - alpha2],
            ScanTarget::TkLine { offset, .. } => [t * 0.5 + offset, t * 0.5 - offset, Complex64::new(f64::NAN, 0.0)],
        }
    }

    fn eval(&self, dim: Dimension, t: Complex64) -> Complex64 {
        match *self {
            ScanTarget::TkLine { k, .. } => {
                let a = self.alpha(t);
                k111_residue_expression(dim, k, a[0], a[1])
            }
            _ => k111_gamma_ratio(dim, self.alpha(t)),
        }
    }

    fn validate(&self) -> Result<()> {
        if let ScanTarget::Alpha { slot, .. } = self {
            if *slot > 2 {
                return Err(Error::InvalidArgument(format!("slot must be 0, 1 or 2, got {slot}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanOptions {
    pub start: f64,
    pub end: f64,
    /// Spacing of the coarse ring centers.
    pub step: f64,
    pub radius: f64,
    pub ring_size: usize,
    /// Detection threshold on `|a₋₁| / (r · max_ring |F|)`.
    pub threshold: f64,
}

impl ScanOptions {
    pub fn window(start: f64, end: f64) -> Self {
        ScanOptions { start, end, step: 0.25, radius: 0.15, ring_size: 32, threshold: 1e-6 }
    }
}

const LATTICE_TOL: f64 = 1e-4;

/// `Some(k)` when `x = −ρ − 2k` for some `k ∈ ℕ`.
fn lattice_index(x: f64, rho: f64) -> Option<i64> {
    let k = (-rho - x) / 2.0;
    let kr = k.round();
    ((k - kr).abs() * 2.0 < LATTICE_TOL && kr >= 0.0).then_some(kr as i64)
}

fn family_of_slot(j: usize) -> PoleFamily {
    [PoleFamily::Alpha1, PoleFamily::Alpha2, PoleFamily::Alpha3][j]
}

fn classify(dim: Dimension, target: &ScanTarget, t: f64) -> (PoleFamily, i64, String) {
    let rho = dim.rho();
    let a = target.alpha(Complex64::new(t, 0.0));
    match *target {
        ScanTarget::TkLine { k, .. } => {
            // α₁ + α₂ = 2k − 2l
            let l = (2.0 * k as f64 - t) / 2.0;
            let lr = l.round();
            if (l - lr).abs() * 2.0 < LATTICE_TOL && lr >= 0.0 {
                return (PoleFamily::TkLine, lr as i64, format!("α₁+α₂ = {} (k = {k}, l = {lr})", 2.0 * k as f64 - 2.0 * lr));
            }
        }
        _ => {
            for (j, aj) in a.iter().enumerate() {
                if let Some(kj) = lattice_index(aj.re, rho) {
                    return (family_of_slot(j), kj, format!("α{} = {}", j + 1, -rho - 2.0 * kj as f64));
                }
            }
            let sum: Complex64 = a.iter().sum();
            if let Some(k) = lattice_index(sum.re, rho) {
                return (PoleFamily::Sum, k, format!("α₁+α₂+α₃ = {}", -rho - 2.0 * k as f64));
            }
        }
    }
    (PoleFamily::Unclassified, 0, format!("t = {t}"))
}

/// Lattice points of the scan variable inside `[start, end]`.
pub fn expected_poles(dim: Dimension, target: &ScanTarget, start: f64, end: f64) -> Vec<f64> {
    let rho = dim.rho();
    let mut out = Vec::new();
    let mut push_family = |offset: f64| {
        // t = offset − ρ − 2k
        for k in 0.. {
            let t = offset - rho - 2.0 * k as f64;
            if t < start {
                break;
            }
            if t <= end {
                out.push(t);
            }
        }
    };
    match *target {
        ScanTarget::Alpha { fixed, .. } => {
            push_family(0.0);
            push_family(-(fixed[0] + fixed[1]).re);
        }
        ScanTarget::Sum { alpha1, alpha2 } => {
            push_family(0.0);
            push_family((alpha1 + alpha2).re);
        }
        ScanTarget::TkLine { k, .. } => push_family(2.0 * k as f64 + rho),
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() < LATTICE_TOL);
    out
}

fn ring_score(dim: Dimension, target: &ScanTarget, center: Complex64, radius: f64, m: usize) -> Result<(crate::mero::LaurentFit, f64)> {
    let mut peak = 0.0f64;
    let fit = residue_ring(
        |z| {
            let v = target.eval(dim, z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite("closed form on a scan ring"));
            }
            peak = peak.max(v.norm());
            Ok(v)
        },
        center,
        radius,
        m,
    )?;
    let score = if peak > 0.0 { fit.residue.norm() / (radius * peak) } else { 0.0 };
    Ok((fit, score))
}

/// Poles of the target along the real window, located by a coarse cover of
/// rings followed by a re-centred ring at each candidate.
pub fn pole_scan(dim: Dimension, target: &ScanTarget, opts: &ScanOptions) -> Result<Vec<PoleReport>> {
    target.validate()?;
    if !(opts.end > opts.start && opts.step > 0.0 && opts.radius > 0.0 && opts.step < 2.0 * opts.radius) {
        return Err(Error::InvalidArgument(
            "scan needs start < end and 0 < step < 2·radius so that the rings cover the window".into(),
        ));
    }
    let mut found: Vec<PoleReport> = Vec::new();
    let n_centers = ((opts.end - opts.start) / opts.step).ceil() as usize + 1;
    for i in 0..n_centers {
        let c = Complex64::new(opts.start + i as f64 * opts.step, 0.0);
        let (fit, score) = ring_score(dim, target, c, opts.radius, opts.ring_size)?;
        if score <= opts.threshold {
            continue;
        }
        let guess = fit.pole_location();
        if (guess - c).norm() > opts.radius {
            continue;
        }
        let r2 = opts.radius / 3.0;
        let (fine, fine_score) = ring_score(dim, target, Complex64::new(guess.re, 0.0), r2, opts.ring_size)?;
        if fine_score <= opts.threshold {
            continue;
        }
        let pos = fine.pole_location().re;
        if pos < opts.start - 1e-9 || pos > opts.end + 1e-9 {
            continue;
        }
        if found.iter().any(|p| (p.position - pos).abs() < 1e-3) {
            continue;
        }
        let (family, index, location) = classify(dim, target, pos);
        found.push(PoleReport { family, index, location, position: pos, residue: fine.residue });
    }
    found.sort_by(|a, b| a.position.partial_cmp(&b.position).unwrap());
    Ok(found)
}

/// Largest detection score over rings centred at the given points.
pub fn max_regular_score(dim: Dimension, target: &ScanTarget, centers: &[f64], radius: f64, m: usize) -> Result<f64> {
    centers
        .iter()
        .map(|&c| ring_score(dim, target, Complex64::new(c, 0.0), radius, m).map(|r| r.1))
        .try_fold(0.0f64, |acc, s| s.map(|s| acc.max(s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn positions(r: &[PoleReport]) -> Vec<f64> {
        r.iter().map(|p| p.position).collect()
    }

    fn same(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-4)
    }

    #[test]
    fn generic_alpha3_scan() {
        let d = Dimension::three();
        let t = ScanTarget::Alpha { slot: 2, fixed: [c(0.6), c(0.4)] };
        let found = pole_scan(d, &t, &ScanOptions::window(-6.0, 1.0)).unwrap();
        assert!(same(&positions(&found), &expected_poles(d, &t, -6.0, 1.0)), "{found:?}");
        assert!(found.iter().all(|p| p.family != PoleFamily::Unclassified));
    }

    #[test]
    fn tk_lines_even_dimension() {
        let d = Dimension::new(4).unwrap();
        let t = ScanTarget::TkLine { k: 1, offset: c(0.31) };
        let found = pole_scan(d, &t, &ScanOptions::window(-5.0, 3.0)).unwrap();
        assert!(same(&positions(&found), &[-4.0, -2.0, 0.0, 2.0]), "{found:?}");
    }

    #[test]
    fn tk_lines_cancel_in_odd_dimension() {
        let d = Dimension::three();
        let t = ScanTarget::TkLine { k: 1, offset: c(0.31) };
        let found = pole_scan(d, &t, &ScanOptions::window(-5.0, 3.0)).unwrap();
        assert!(same(&positions(&found), &[0.0, 2.0]), "{found:?}");
    }

    #[test]
    fn regular_points_are_quiet() {
        let d = Dimension::three();
        let t = ScanTarget::Alpha { slot: 2, fixed: [c(0.6), c(0.4)] };
        let mids = [-5.5, -4.5, -3.5, -2.5, -1.5, -0.5, 0.5];
        assert!(max_regular_score(d, &t, &mids, 0.15, 32).unwrap() < 1e-6);
    }
}
