//! Verification suites. Each check reports the worst defect over its
//! randomized instances together with the identity it measures.

use anyhow::{bail, Result};
use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::f64::consts::PI;
use std::time::Instant;

use sphere_forms::lorentz::{cocycle_defect, distance_covariance_defect, inverse_law_defect};
use sphere_forms::mero::residue_pair_hs;
use sphere_forms::reps::{
    change_of_variables_defect, dirac_pair, dirac_pair_distributional, duality_defect, knapp_stein_intertwining_defect,
    residue_intertwining_defect, PrincipalSeries, RepParameter, SphereFunction,
};
use sphere_forms::special::gamma;
use sphere_forms::spectral_ops::{gjms_constant, knapp_stein_descent, knapp_stein_direct, MultiplierFamily};
use sphere_forms::sphgrid::{Grid, GridFunction, HarmonicCoeffs};
use sphere_forms::trilinear::{
    closed_form_ratio_check, expected_poles, k111_exact_n3, k_form, k_invariance_defect, pole_scan, regres_defect,
    t_invariance_defect, KFormOptions, KMethod, ParameterTriple, RegresOptions, ScanOptions, ScanTarget, TFormOptions,
};
use sphere_forms::{ConformalMap, Dimension, SpherePoint};

use crate::config::RunConfig;
use crate::format::{normalize_numbers, sci};

pub const SUITES: [&str; 6] = ["geometry", "representation", "bernstein", "residues", "intertwining", "trilinear"];

/// Relative change applied to `c₁` in fault-injection mode.
pub const FAULT_FACTOR: f64 = 1.01;

#[derive(Clone, Debug)]
pub struct Check {
    pub id: String,
    pub anchor: &'static str,
    pub defect: f64,
    pub tolerance: f64,
    pub instances: usize,
    pub error: Option<String>,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.error.is_none() && self.defect <= self.tolerance
    }

    fn to_json(&self) -> Value {
        let mut v = json!({
            "id": self.id,
            "anchor": self.anchor,
            "defect": sci(self.defect),
            "tolerance": sci(self.tolerance),
            "instances": self.instances,
            "pass": self.pass(),
        });
        if let Some(e) = &self.error {
            v["error"] = Value::String(e.clone());
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }
}

/// Worst defect over `instances` runs of `f`; the first error ends the check.
fn check<F>(id: impl Into<String>, anchor: &'static str, tolerance: f64, instances: usize, mut f: F) -> Check
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut worst = 0.0f64;
    let mut error = None;
    for i in 0..instances {
        match f(i) {
            Ok(d) if d.is_nan() => {
                error = Some(format!("instance {i}: defect is NaN"));
                break;
            }
            Ok(d) => worst = worst.max(d),
            Err(e) => {
                error = Some(format!("instance {i}: {e:#}"));
                break;
            }
        }
    }
    Check { id: id.into(), anchor, defect: worst, tolerance, instances, error }
}

fn rng(cfg: &RunConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * (r.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn geometry(cfg: &RunConfig) -> Result<Vec<Check>> {
    let dim = Dimension::new(cfg.n)?;
    let t = &cfg.tolerances;
    let count = 10 * cfg.instances;
    let mut r = rng(cfg, 1);
    let cocycle = check("cocycle", "κ(g₁g₂, x) = κ(g₁, g₂(x)) κ(g₂, x)", t.geometry_exact, count, |_| {
        let g1 = ConformalMap::random_element(dim, r.next_u64(), 1.0);
        let g2 = ConformalMap::random_element(dim, r.next_u64(), 1.0);
        Ok(cocycle_defect(&g1, &g2, &SpherePoint::random(dim, &mut r))?)
    });
    let inverse = check("inverse_law", "κ(g⁻¹, g(x)) κ(g, x) = 1", t.geometry_exact, count, |_| {
        let g = ConformalMap::random_element(dim, r.next_u64(), 1.0);
        Ok(inverse_law_defect(&g, &SpherePoint::random(dim, &mut r))?)
    });
    let covariance = check(
        "distance_covariance",
        "|g(x) − g(y)| = κ(g, x)^{1/2} κ(g, y)^{1/2} |x − y|",
        t.geometry_exact,
        count,
        |_| {
            let g = ConformalMap::random_element(dim, r.next_u64(), 1.0);
            let x = SpherePoint::random(dim, &mut r);
            let y = SpherePoint::random(dim, &mut r);
            Ok(distance_covariance_defect(&g, &x, &y)?)
        },
    );
    let d3 = Dimension::three();
    let grid = Grid::new(64)?;
    let deg = cfg.l_max.min(8);
    let change = check(
        "change_of_variables",
        "∫ f(g⁻¹(x)) dσ(x) = ∫ f(y) κ(g, y)^{n−1} dσ(y)",
        t.geometry_quadrature,
        cfg.instances,
        |_| {
            let g = ConformalMap::random_element(d3, r.next_u64(), 0.5);
            let f = HarmonicCoeffs::random(deg, &mut r, false);
            Ok(change_of_variables_defect(&g, &f, &grid)?)
        },
    );
    Ok(vec![cocycle, inverse, covariance, change])
}

fn representation(cfg: &RunConfig) -> Result<Vec<Check>> {
    let d = Dimension::three();
    let t = cfg.tolerances.representation;
    let mut r = rng(cfg, 2);
    let deg = cfg.l_max.min(6);
    let grid = Grid::new(64)?;
    let duality = check("duality", "(π_λ(g)f, φ) = (f, π_{−λ}(g⁻¹)φ)", t, cfg.instances, |_| {
        let lam = Complex64::new(uniform(&mut r, -1.0, 1.0), uniform(&mut r, -1.0, 1.0));
        let g = ConformalMap::random_element(d, r.next_u64(), 0.5);
        let f = HarmonicCoeffs::random(deg, &mut r, false);
        let phi = HarmonicCoeffs::random(deg, &mut r, false);
        Ok(duality_defect(d, RepParameter::new(lam), &g, &f, &phi, &grid)? / (f.norm_l2() * phi.norm_l2()))
    });
    let group_law = check("group_law", "π_λ(g₁) π_λ(g₂) = π_λ(g₁g₂)", t, cfg.instances, |_| {
        let lam = RepParameter::new(Complex64::new(uniform(&mut r, -1.0, 1.0), uniform(&mut r, -1.0, 1.0)));
        let g1 = ConformalMap::random_element(d, r.next_u64(), 0.7);
        let g2 = ConformalMap::random_element(d, r.next_u64(), 0.7);
        let f = HarmonicCoeffs::random(deg, &mut r, false);
        let inner = PrincipalSeries::new(lam, &g2, &f)?;
        let nested = PrincipalSeries::new(lam, &g1, &inner)?;
        let g12 = g1.compose(&g2);
        let direct = PrincipalSeries::new(lam, &g12, &f)?;
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for _ in 0..20 {
            let x = SpherePoint::random(d, &mut r).as3();
            let a = direct.eval(x);
            worst = worst.max((nested.eval(x) - a).norm());
            scale = scale.max(a.norm());
        }
        Ok(worst / scale)
    });
    let dirac = check("dirac", "(π_λ(g)δ, φ) = κ(g, 𝟏)^{ρ−λ} φ(g(𝟏))", t, cfg.instances, |_| {
        let lam = RepParameter::new(Complex64::new(uniform(&mut r, -1.0, 1.0), uniform(&mut r, -1.0, 1.0)));
        let g = ConformalMap::random_element(d, r.next_u64(), 0.7);
        let phi = HarmonicCoeffs::random(deg, &mut r, false);
        let a = dirac_pair(d, lam, &g, &phi)?;
        let b = dirac_pair_distributional(d, lam, &g, &phi)?;
        Ok((a - b).norm() / a.norm())
    });
    Ok(vec![duality, group_law, dirac])
}

/// `2^{n−1} π^ρ 2^s Γ(s/2+ρ) / Γ(s/2+2ρ)`.
fn area_closed_form(dim: Dimension, s: Complex64) -> Complex64 {
    let rho = dim.rho();
    let n = dim.n() as f64;
    let lead = 2f64.powf(n - 1.0) * PI.powf(rho);
    lead * (s * std::f64::consts::LN_2).exp() * gamma(s * 0.5 + rho) / gamma(s * 0.5 + 2.0 * rho)
}

fn bernstein(cfg: &RunConfig) -> Result<Vec<Check>> {
    let t = cfg.tolerances.bernstein;
    let d3 = Dimension::three();
    let one = HarmonicCoeffs::constant(0, c(1.0));
    let svals = [c(2.0), c(0.5), Complex64::new(-1.5, 0.3), Complex64::new(-3.2, 0.4)];
    let area = check(
        "area_closed_form",
        "(h_s, 1) = 2^{n−1} π^ρ 2^s Γ(s/2+ρ)/Γ(s/2+2ρ)",
        t,
        svals.len(),
        |i| {
            let v = sphere_forms::mero::pair_hs(d3, svals[i], &one)?;
            let e = area_closed_form(d3, svals[i]);
            Ok(((v - e) / e).norm())
        },
    );
    let mut r = rng(cfg, 3);
    let kernel = check(
        "bernstein_kernel",
        "[Δ_x + (s/2)(s/2+n−2)] |x−y|^s = s(s+n−3) |x−y|^{s−2}",
        t,
        cfg.instances,
        |_| {
            let s = Complex64::new(uniform(&mut r, 4.2, 7.5), uniform(&mut r, -0.3, 0.3));
            let x = SpherePoint::random(d3, &mut r).as3();
            let y = SpherePoint::random(d3, &mut r).as3();
            Ok(sphere_forms::trilinear::bernstein_kernel_defect(s, x, y, 64)?)
        },
    );
    let mut dims = vec![3, 4, 5];
    if !dims.contains(&cfg.n) {
        dims.push(cfg.n);
    }
    let offsets = [c(0.8), Complex64::new(1.3, 0.2), c(1.9), Complex64::new(2.6, -0.3), c(3.4)];
    let descent = check(
        "descent_consistency",
        "e_l(s) = e_l(s+2) [−l(l+n−2) + σ/2(σ/2+n−2)] / (σ(σ+n−3)), σ = s+2",
        t,
        dims.len() * offsets.len(),
        |i| {
            let dim = Dimension::new(dims[i / offsets.len()])?;
            let alpha = offsets[i % offsets.len()] - dim.rho();
            let a = knapp_stein_direct(dim, alpha, 32)?;
            let b = knapp_stein_descent(dim, alpha, 32, 1)?;
            Ok(a.iter().zip(&b).map(|(x, y)| (x - y).norm() / x.norm()).fold(0.0, f64::max))
        },
    );
    Ok(vec![area, kernel, descent])
}

fn residues(cfg: &RunConfig, fault: bool) -> Result<Vec<Check>> {
    let d = Dimension::three();
    let mut out = Vec::new();
    for k in 0..=2usize {
        let mut r = rng(cfg, 10 + k as u64);
        let mut c_k = gjms_constant(d, k).c_k;
        if fault && k == 1 {
            c_k *= FAULT_FACTOR;
        }
        out.push(check(
            format!("residue_k{k}"),
            "Res_{(s+n−1)/2 = −k} (h_s, f) = c_k (Δ_k f)(𝟏)",
            cfg.tolerances.residues,
            cfg.instances,
            |_| {
                let f = HarmonicCoeffs::random(cfg.l_max, &mut r, false);
                let fit = residue_pair_hs(d, k, &f, cfg.ring.radius, cfg.ring.size)?;
                let target = MultiplierFamily::gjms(d, k, f.l_max()).apply(&f)?.base_value() * c_k;
                Ok((fit.residue * 0.5 - target).norm() / target.norm())
            },
        ));
    }
    Ok(out)
}

fn intertwining(cfg: &RunConfig) -> Result<Vec<Check>> {
    let d = Dimension::three();
    let t = cfg.tolerances.intertwining;
    let mut out = Vec::new();
    for k in 1..=2usize {
        let mut r = rng(cfg, 20 + k as u64);
        out.push(check(
            format!("residue_operator_k{k}"),
            "R_k ∘ π_{−k}(g) = π_k(g) ∘ R_k",
            t,
            cfg.instances,
            |_| {
                let g = ConformalMap::random_element(d, r.next_u64(), 0.3);
                let f = HarmonicCoeffs::random(cfg.l_max, &mut r, false);
                Ok(residue_intertwining_defect(d, k, &g, &f, 2 * cfg.l_max, 2)?)
            },
        ));
    }
    let mut r = rng(cfg, 23);
    out.push(check("knapp_stein", "K_λ ∘ π_λ(g) = π_{−λ}(g) ∘ K_λ", t, cfg.instances.min(3), |_| {
        let lam = Complex64::new(uniform(&mut r, 0.3, 0.45), uniform(&mut r, -0.2, 0.2));
        let g = ConformalMap::random_element(d, r.next_u64(), 0.3);
        let f = HarmonicCoeffs::random(cfg.l_max, &mut r, false);
        Ok(knapp_stein_intertwining_defect(d, lam, &g, &f, 2 * cfg.l_max, 2)?)
    }));
    Ok(out)
}

fn scan_defect(dim: Dimension, target: ScanTarget, start: f64, end: f64, threshold: f64) -> Result<f64> {
    let mut opts = ScanOptions::window(start, end);
    opts.threshold = threshold;
    let found = pole_scan(dim, &target, &opts)?;
    let expected = expected_poles(dim, &target, start, end);
    if found.len() != expected.len() {
        return Ok(1.0);
    }
    Ok(found.iter().zip(&expected).map(|(p, e)| (p.position - e).abs()).fold(0.0, f64::max))
}

fn trilinear(cfg: &RunConfig) -> Result<Vec<Check>> {
    let d = Dimension::three();
    let tol = &cfg.tolerances;
    let grid = Grid::with_sizes(cfg.grid.n_theta, cfg.grid.n_phi)?;
    let mut out = Vec::new();

    let mut r = rng(cfg, 30);
    out.push(check(
        "k_invariance",
        "𝒦_𝛂(π_{λ₁}(g)f₁, π_{λ₂}(g)f₂, π_{λ₃}(g)f₃) = 𝒦_𝛂(f₁, f₂, f₃)",
        tol.trilinear_invariance,
        cfg.instances,
        |_| {
            let alpha = [0, 1, 2].map(|_| c(uniform(&mut r, 1.5, 3.0)));
            let params = ParameterTriple::from_alpha(alpha);
            let g = ConformalMap::random_element(d, r.next_u64(), 0.2);
            let fs: Vec<HarmonicCoeffs> = (0..3).map(|_| HarmonicCoeffs::random(4, &mut r, true)).collect();
            Ok(k_invariance_defect(d, &params, &g, [&fs[0], &fs[1], &fs[2]], &grid, &KFormOptions::default())?)
        },
    ));

    let mut r = rng(cfg, 31);
    let t_grid = Grid::with_sizes(12, 24)?;
    out.push(check(
        "t_invariance",
        "𝒯_k(π_{λ₁}(g)f₁, π_{λ₂}(g)f₂, π_{λ₃}(g)f₃) = 𝒯_k(f₁, f₂, f₃), λ from (α₁, α₂, −ρ−2k)",
        tol.trilinear_invariance,
        2,
        |k| {
            let (a1, a2) = if k == 0 { (c(1.3), c(2.4)) } else { (c(1.5), c(4.5)) };
            let g = ConformalMap::random_element(d, r.next_u64(), 0.2);
            let fs: Vec<HarmonicCoeffs> = (0..3).map(|_| HarmonicCoeffs::random(3, &mut r, true)).collect();
            Ok(t_invariance_defect(d, k, a1, a2, &g, [&fs[0], &fs[1], &fs[2]], &t_grid, &TFormOptions::default())?)
        },
    ));

    let triples = [[5.3, 6.1, 4.7], [4.6, 4.9, 5.8], [6.4, 4.5, 5.1], [5.0, 5.0, 5.0], [4.8, 6.6, 4.6]];
    let ones = GridFunction::constant(grid.clone(), c(1.0));
    out.push(check(
        "k111_closed_form",
        "𝒦_𝛂(1,1,1) = 8π³ 2^{α₁+α₂+α₃} Γ((Σα+ρ)/2) Π_j Γ((α_j+ρ)/2) / Π_{i<j} Γ(ρ+(α_i+α_j)/2), n = 3",
        tol.trilinear_closed_form,
        triples.len(),
        |i| {
            let alpha = triples[i].map(c);
            let v = k_form(d, &ParameterTriple::from_alpha(alpha), [&ones, &ones, &ones], KMethod::Direct)?;
            let e = k111_exact_n3(alpha);
            Ok(((v - e) / e).norm())
        },
    ));

    let mut r = rng(cfg, 32);
    let regres_opts = RegresOptions::default();
    out.push(check(
        "regres_k0",
        "Res_{(α₃+ρ)/2 = −k} 𝒦_𝛂(f₁, f₂, f₃) = c_k 𝒯_k(f₁, f₂, f₃)",
        tol.regres,
        1,
        |_| {
            let fs: Vec<HarmonicCoeffs> = (0..3).map(|_| HarmonicCoeffs::random(3, &mut r, false)).collect();
            let rep = regres_defect(d, 0, c(2.5), c(3.5), [&fs[0], &fs[1], &fs[2]], &grid, &regres_opts)?;
            Ok(rep.half_parameter_defect)
        },
    ));
    let one = HarmonicCoeffs::constant(0, c(1.0));
    out.push(check(
        "regres_k1_closed_form",
        "Res_{(α₃+ρ)/2 = −k} 𝒦_𝛂(1,1,1) = c_k 𝒯_k(1,1,1), ratios against the residue of the Gamma ratio",
        tol.regres,
        2,
        |i| {
            if i == 0 {
                let rep = regres_defect(d, 1, c(3.0), c(5.0), [&one, &one, &one], &grid, &regres_opts)?;
                Ok(rep.half_parameter_defect)
            } else {
                let rep = closed_form_ratio_check(d, 1, [[c(3.0), c(5.0)], [c(2.2), c(4.6)]], &grid, &regres_opts)?;
                Ok(rep.normalized_defect.max(rep.residue_vs_t))
            }
        },
    ));

    let th = tol.poles;
    let generic = [c(0.6), c(0.4)];
    let scans: Vec<(&str, Dimension, ScanTarget, f64, f64)> = vec![
        ("alpha3", d, ScanTarget::Alpha { slot: 2, fixed: generic }, -6.0, 1.0),
        ("alpha1", d, ScanTarget::Alpha { slot: 0, fixed: generic }, -6.0, 1.0),
        ("sum", d, ScanTarget::Sum { alpha1: generic[0], alpha2: generic[1] }, -6.0, 1.0),
        ("tk_line_n4", Dimension::new(4)?, ScanTarget::TkLine { k: 1, offset: c(0.31) }, -5.0, 3.0),
    ];
    for (name, dim, target, a, b) in scans {
        out.push(check(
            format!("pole_scan_{name}"),
            "poles on α_j = −ρ−2k, α₁+α₂+α₃ = −ρ−2k and α₁+α₂ = 2k−2l",
            th,
            1,
            |_| scan_defect(dim, target, a, b, th),
        ));
    }
    Ok(out)
}

fn run_suite(name: &'static str, cfg: &RunConfig, fault: bool) -> SuiteResult {
    let start = Instant::now();
    let result = match name {
        "geometry" => geometry(cfg),
        "representation" => representation(cfg),
        "bernstein" => bernstein(cfg),
        "residues" => residues(cfg, fault),
        "intertwining" => intertwining(cfg),
        "trilinear" => trilinear(cfg),
        _ => unreachable!("suite names are validated"),
    };
    let checks = result.unwrap_or_else(|e| {
        vec![Check {
            id: format!("{name}_setup"),
            anchor: "suite setup",
            defect: f64::INFINITY,
            tolerance: 0.0,
            instances: 0,
            error: Some(format!("{e:#}")),
        }]
    });
    SuiteResult { name, checks, seconds: start.elapsed().as_secs_f64() }
}

pub fn select_suites(requested: &[String]) -> Result<Vec<&'static str>> {
    if requested.is_empty() {
        return Ok(SUITES.to_vec());
    }
    let mut out = Vec::new();
    for r in requested {
        match SUITES.iter().find(|s| **s == r.as_str()) {
            Some(s) if !out.contains(s) => out.push(*s),
            Some(_) => {}
            None => bail!("unknown suite {r:?}; available suites: {}", SUITES.join(", ")),
        }
    }
    Ok(out)
}

pub fn run(cfg: &RunConfig, suites: &[&'static str], fault: bool) -> Vec<SuiteResult> {
    suites.iter().map(|s| run_suite(s, cfg, fault)).collect()
}

/// Report document; timing fields are `seconds` and `total_seconds`.
pub fn report_json(cfg: &RunConfig, results: &[SuiteResult], fault: bool, total_seconds: f64) -> Value {
    let mut config = serde_json::to_value(cfg).expect("config serializes");
    normalize_numbers(&mut config);
    let suites: Vec<Value> = results
        .iter()
        .map(|s| {
            json!({
                "suite": s.name,
                "pass": s.pass(),
                "seconds": sci(s.seconds),
                "checks": s.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "fault_inject": fault,
        "suites": suites,
        "pass": results.iter().all(SuiteResult::pass),
        "total_seconds": sci(total_seconds),
    })
}
