//! `multiplier`, `pair`, `residue`, `trilinear` and `pole-scan`.

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde_json::{json, Value};
use std::path::Path;

use sphere_forms::mero::{pair_hs, pair_hs_components, residue_pair_hs, residue_ring, riesz_pole};
use sphere_forms::spectral_ops::{
    bernstein_multiplier, gjms_constant, knapp_stein_multipliers, riesz_multipliers, MultiplierFamily, DIRECT_MARGIN,
};
use sphere_forms::sphgrid::io::read_coeffs;
use sphere_forms::sphgrid::{Grid, HarmonicCoeffs};
use sphere_forms::trilinear::{
    expected_poles, k_form_with, pole_scan, t_form_fn, KFormOptions, KMethod, ParameterTriple, ScanOptions,
    ScanTarget, TFormOptions,
};
use sphere_forms::reps::SphereFunction;
use sphere_forms::Dimension;

use crate::format::{complex, complex_str, sci, sci_str};

/// `re` or `re,im`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("{p:?} is not a number (expected RE or RE,IM)"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("{s:?}: expected RE or RE,IM")),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("{s:?} is not finite"));
    }
    Ok(z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MultiplierChoice {
    Laplacian,
    Gjms,
    ResidueOperator,
    Bernstein,
    Riesz,
    KnappStein,
}

/// CSV `l,re,im`.
pub fn multiplier_csv(dim: Dimension, kind: MultiplierChoice, k: usize, param: Option<Complex64>, l_max: usize) -> Result<String> {
    let need = |what: &str| param.with_context(|| format!("--param is required for {what}"));
    let values: Vec<Complex64> = match kind {
        MultiplierChoice::Laplacian => MultiplierFamily::laplacian(dim, l_max).values,
        MultiplierChoice::Gjms => MultiplierFamily::gjms(dim, k, l_max).values,
        MultiplierChoice::ResidueOperator => MultiplierFamily::residue_operator(dim, k, l_max).values,
        MultiplierChoice::Bernstein => {
            let s = need("bernstein (the exponent s)")?;
            (0..=l_max).map(|l| bernstein_multiplier(dim, s, l)).collect()
        }
        MultiplierChoice::Riesz => riesz_multipliers(dim, need("riesz (the exponent s)")?, l_max, DIRECT_MARGIN)?,
        MultiplierChoice::KnappStein => {
            knapp_stein_multipliers(dim, need("knapp-stein (the parameter α)")?, l_max, DIRECT_MARGIN)?
        }
    };
    let mut out = String::from("l,re,im\n");
    for (l, v) in values.iter().enumerate() {
        out.push_str(&format!("{l},{},{}\n", sci_str(v.re), sci_str(v.im)));
    }
    Ok(out)
}

/// The test function: a coefficient file, or the constant `constant`.
pub fn load_function(path: Option<&Path>, constant: Complex64) -> Result<HarmonicCoeffs> {
    match path {
        Some(p) => read_coeffs(p).with_context(|| format!("reading coefficient file {}", p.display())),
        None => Ok(HarmonicCoeffs::constant(0, constant)),
    }
}

fn require_constant_off_s2(dim: Dimension, path: Option<&Path>) -> Result<()> {
    if dim.n() != 3 && path.is_some() {
        bail!("coefficient files describe functions on S² (n = 3); for n = {} only --constant is supported", dim.n());
    }
    Ok(())
}

pub fn pair(dim: Dimension, s: Complex64, path: Option<&Path>, constant: Complex64) -> Result<(Value, Complex64)> {
    require_constant_off_s2(dim, path)?;
    let value = if dim.n() == 3 {
        pair_hs(dim, s, &load_function(path, constant)?)?
    } else {
        pair_hs_components(dim, s, &[constant])?
    };
    Ok((json!({"n": dim.n(), "s": complex(s), "value": complex(value)}), value))
}

pub struct ResidueOutput {
    pub json: Value,
    pub residue: Complex64,
    pub half_parameter: Complex64,
}

pub fn residue(
    dim: Dimension,
    k: usize,
    path: Option<&Path>,
    constant: Complex64,
    radius: f64,
    ring_size: usize,
) -> Result<ResidueOutput> {
    require_constant_off_s2(dim, path)?;
    let (fit, dk_f) = if dim.n() == 3 {
        let f = load_function(path, constant)?;
        let fit = residue_pair_hs(dim, k, &f, radius, ring_size)?;
        let dk = MultiplierFamily::gjms(dim, k, f.l_max()).apply(&f)?.base_value();
        (fit, dk)
    } else {
        let center = Complex64::new(riesz_pole(dim, k), 0.0);
        let fit = residue_ring(|s| pair_hs_components(dim, s, &[constant]), center, radius, ring_size)?;
        (fit, MultiplierFamily::gjms(dim, k, 0).values[0] * constant)
    };
    let c_k = gjms_constant(dim, k).c_k;
    let half = fit.residue * 0.5;
    let json = json!({
        "n": dim.n(),
        "k": k,
        "center": complex(fit.center),
        "radius": sci(fit.radius),
        "ring_size": fit.ring_size,
        "residue": complex(fit.residue),
        "regular": complex(fit.regular_value),
        "condition": sci(fit.condition),
        "half_parameter_residue": complex(half),
        "c_k": sci(c_k),
        "c_k_delta_k_f_at_base": complex(dk_f * c_k),
    });
    Ok(ResidueOutput { json, residue: fit.residue, half_parameter: half })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TrilinearMethod {
    Direct,
    Fast,
    Singular,
}

pub struct TrilinearRequest<'a> {
    pub params: ParameterTriple,
    pub from_lambda: bool,
    pub files: [Option<&'a Path>; 3],
    pub method: TrilinearMethod,
    pub k: Option<usize>,
    pub n_theta: usize,
    pub n_phi: usize,
}

fn triple(z: &[Complex64; 3]) -> Value {
    Value::Array(z.iter().map(|&v| complex(v)).collect())
}

pub fn trilinear(req: &TrilinearRequest) -> Result<Value> {
    let dim = Dimension::three();
    let fs: Vec<HarmonicCoeffs> = req.files.iter().map(|p| load_function(*p, Complex64::new(1.0, 0.0))).collect::<Result<_>>()?;
    let grid = Grid::with_sizes(req.n_theta, req.n_phi)?;
    let (value, estimate, params) = match req.method {
        TrilinearMethod::Direct | TrilinearMethod::Fast => {
            if req.k.is_some() {
                bail!("--k applies only to --method singular");
            }
            let method = if req.method == TrilinearMethod::Direct { KMethod::Direct } else { KMethod::Fast };
            let opts = KFormOptions { method, ..Default::default() };
            let eval = |g: &std::sync::Arc<Grid>| {
                let s: Vec<_> = fs.iter().map(|f| f.sample(g)).collect();
                k_form_with(dim, &req.params, [&s[0], &s[1], &s[2]], &opts)
            };
            let v = eval(&grid)?;
            // the same rule on the grid of half the size
            let coarse = Grid::with_sizes((req.n_theta / 2).max(2), (req.n_phi / 2).max(3))?;
            let w = eval(&coarse)?;
            (v, (v - w).norm(), req.params)
        }
        TrilinearMethod::Singular => {
            let k = req.k.context("--method singular needs --k (the pole index of α₃ = −ρ−2k)")?;
            let [a1, a2, _] = req.params.alpha;
            let t = t_form_fn(dim, k, a1, a2, [&fs[0], &fs[1], &fs[2]], &grid, &TFormOptions::default())?;
            let p = ParameterTriple::from_alpha([
                a1,
                a2,
                Complex64::new(-dim.rho() - 2.0 * k as f64, 0.0),
            ]);
            (t.value, t.truncation_error_estimate, p)
        }
    };
    let method = match req.method {
        TrilinearMethod::Direct => "direct",
        TrilinearMethod::Fast => "fast",
        TrilinearMethod::Singular => "singular",
    };
    let mut out = json!({
        "value": complex(value),
        "method": method,
        "grid": {"n_theta": req.n_theta, "n_phi": req.n_phi},
        "truncation_error_estimate": sci(estimate),
        "alpha": triple(&params.alpha),
        "lambda": triple(&params.lambda),
        "input": if req.from_lambda { "lambda" } else { "alpha" },
    });
    if let Some(k) = req.k {
        out["k"] = json!(k);
    }
    Ok(out)
}

pub fn echo_conversion(params: &ParameterTriple, from_lambda: bool) -> String {
    let show = |z: &[Complex64; 3]| z.iter().map(|&v| complex_str(v)).collect::<Vec<_>>().join(", ");
    if from_lambda {
        format!("λ = ({}) → α = ({})", show(&params.lambda), show(&params.alpha))
    } else {
        format!("α = ({}) → λ = ({})", show(&params.alpha), show(&params.lambda))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ScanFamily {
    Alpha1,
    Alpha2,
    Alpha3,
    Sum,
    TkLine,
}

pub fn scan_target(family: ScanFamily, fixed: &[Complex64], k: usize) -> Result<ScanTarget> {
    let two = |what: &str| -> Result<[Complex64; 2]> {
        match fixed {
            [a, b] => Ok([*a, *b]),
            _ => bail!("--fixed takes two values for {what}, got {}", fixed.len()),
        }
    };
    Ok(match family {
        ScanFamily::Alpha1 => ScanTarget::Alpha { slot: 0, fixed: two("alpha1 (α₂ and α₃)")? },
        ScanFamily::Alpha2 => ScanTarget::Alpha { slot: 1, fixed: two("alpha2 (α₁ and α₃)")? },
        ScanFamily::Alpha3 => ScanTarget::Alpha { slot: 2, fixed: two("alpha3 (α₁ and α₂)")? },
        ScanFamily::Sum => {
            let [a1, a2] = two("sum (α₁ and α₂)")?;
            ScanTarget::Sum { alpha1: a1, alpha2: a2 }
        }
        ScanFamily::TkLine => match fixed {
            [] => ScanTarget::TkLine { k, offset: Complex64::new(0.31, 0.0) },
            [o] => ScanTarget::TkLine { k, offset: *o },
            _ => bail!("--fixed takes at most one value (the offset (α₁−α₂)/2) for tk-line"),
        },
    })
}

pub fn scan(dim: Dimension, target: &ScanTarget, opts: &ScanOptions) -> Result<Value> {
    let found = pole_scan(dim, target, opts)?;
    let expected = expected_poles(dim, target, opts.start, opts.end);
    let detected: Vec<Value> = found
        .iter()
        .map(|p| {
            json!({
                "family": serde_json::to_value(p.family).expect("enum serializes"),
                "index": p.index,
                "location": p.location,
                "position": sci(p.position),
                "residue": complex(p.residue),
            })
        })
        .collect();
    Ok(json!({
        "n": dim.n(),
        "window": [sci(opts.start), sci(opts.end)],
        "step": sci(opts.step),
        "radius": sci(opts.radius),
        "ring_size": opts.ring_size,
        "threshold": sci(opts.threshold),
        "detected": detected,
        "expected": expected.iter().map(|&x| sci(x)).collect::<Vec<_>>(),
    }))
}
