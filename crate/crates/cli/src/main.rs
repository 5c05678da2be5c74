//! `sphere-forms`: verification suites and thin wrappers over the library.
//!
//! Results go to stdout and to a file in the output directory (`--out`,
//! the config's `output`, `$SPHERE_FORMS_OUT`, or the working directory).
//! Numbers are printed in scientific notation with 12 significant digits.
//! Exit status: 0 on success, 1 when a verification check fails, 2 on
//! invalid input or a numerical error.

mod commands;
mod config;
mod format;
mod verify;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use sphere_forms::trilinear::{ParameterTriple, ScanOptions};
use sphere_forms::Dimension;

use commands::{parse_complex, MultiplierChoice, ScanFamily, TrilinearMethod, TrilinearRequest};
use config::RunConfig;
use format::{complex_str, output_dir, to_pretty, write_file};

/// `print!`/`println!` that ignore a closed stdout, so the output files are
/// still written when the reader stops early.
macro_rules! emit {
    ($mac:ident, $($t:tt)*) => {{
        use std::io::Write;
        if let Err(e) = $mac!(std::io::stdout().lock(), $($t)*) {
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                return Err(e.into());
            }
        }
    }};
}

#[derive(Parser)]
#[command(name = "sphere-forms", version, about = "Conformal forms on the sphere: verification and evaluation")]
struct Cli {
    /// JSON run configuration; missing fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config and $SPHERE_FORMS_OUT).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites and write verify_report.json.
    Verify {
        /// Run only this suite (repeatable): geometry, representation,
        /// bernstein, residues, intertwining, trilinear.
        #[arg(long)]
        suite: Vec<String>,
        /// Scale c₁ by 1.01 in the residue checks; the residues suite must then fail.
        #[arg(long)]
        fault_inject: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        instances: Option<usize>,
        /// Degree of the random test functions.
        #[arg(long = "L")]
        l_max: Option<usize>,
        /// Print the effective configuration and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Degree multipliers as CSV `l,re,im` (multiplier.csv).
    Multiplier {
        #[arg(long, value_enum)]
        kind: MultiplierChoice,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Order of Δ_k or R_k.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Exponent s (bernstein, riesz) or parameter α (knapp-stein), as RE or RE,IM.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        param: Option<Complex64>,
        #[arg(long = "L", default_value_t = 16)]
        l_max: usize,
    },
    /// The pairing (h_s, f) with h_s(x) = |x − 𝟏|^s (pair.json).
    Pair {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// Coefficient file of f on S²; without it f is --constant.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
        constant: Complex64,
    },
    /// Ring-fit residue of s ↦ (h_s, f) at s = −(n−1) − 2k (residue.json).
    Residue {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long)]
        coeffs: Option<PathBuf>,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
        constant: Complex64,
        /// Ring radius; defaults to the config value.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long)]
        ring_size: Option<usize>,
    },
    /// The trilinear forms on S² (trilinear.json). Absent function files mean f = 1.
    Trilinear {
        /// α₁ α₂ α₃, each RE or RE,IM.
        #[arg(long, num_args = 3, value_parser = parse_complex, allow_hyphen_values = true, conflicts_with = "lambda", required_unless_present = "lambda")]
        alpha: Option<Vec<Complex64>>,
        /// λ₁ λ₂ λ₃, converted with α₁ = −λ₁+λ₂+λ₃ and cyclically.
        #[arg(long, num_args = 3, value_parser = parse_complex, allow_hyphen_values = true)]
        lambda: Option<Vec<Complex64>>,
        #[arg(long)]
        f1: Option<PathBuf>,
        #[arg(long)]
        f2: Option<PathBuf>,
        #[arg(long)]
        f3: Option<PathBuf>,
        /// direct or fast evaluate 𝒦_𝛂; singular evaluates 𝒯_k at (α₁, α₂).
        #[arg(long, value_enum, default_value = "direct")]
        method: TrilinearMethod,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n_theta: Option<usize>,
        #[arg(long)]
        n_phi: Option<usize>,
    },
    /// Poles of 𝒦(1,1,1) or of its residue along a real line (pole_scan.json).
    PoleScan {
        #[arg(long, value_enum)]
        family: ScanFamily,
        #[arg(long, default_value_t = 3)]
        n: usize,
        /// The fixed parameters: two α values, or the offset for tk-line.
        #[arg(long, num_args = 1..=2, value_parser = parse_complex, allow_hyphen_values = true)]
        fixed: Vec<Complex64>,
        /// k of the plane α₃ = −ρ−2k for tk-line.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        start: f64,
        #[arg(long, allow_hyphen_values = true)]
        end: f64,
        #[arg(long)]
        threshold: Option<f64>,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig> {
    let cfg = match path {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = load_config(cli.config.as_ref())?;
    let out_dir = |cfg: &RunConfig| output_dir(cli.out.as_deref(), cfg.output.as_deref());
    match cli.command {
        Command::Verify { suite, fault_inject, seed, instances, l_max, print_config } => {
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(i) = instances {
                cfg.instances = i;
            }
            if let Some(l) = l_max {
                cfg.l_max = l;
            }
            cfg.validate()?;
            if print_config {
                emit!(writeln, "{}", serde_json::to_string_pretty(&cfg)?);
                return Ok(ExitCode::SUCCESS);
            }
            let suites = verify::select_suites(&suite)?;
            let start = Instant::now();
            let results = verify::run(&cfg, &suites, fault_inject);
            let report = verify::report_json(&cfg, &results, fault_inject, start.elapsed().as_secs_f64());
            let path = write_file(&out_dir(&cfg), "verify_report.json", &to_pretty(&report))?;
            let mut all = true;
            for s in &results {
                for c in &s.checks {
                    let status = if c.pass() { "PASS" } else { "FAIL" };
                    emit!(
                        writeln,
                        "{status} {}/{}: defect {} (tolerance {}) [{}]",
                        s.name,
                        c.id,
                        format::sci_str(c.defect),
                        format::sci_str(c.tolerance),
                        c.anchor
                    );
                    if let Some(e) = &c.error {
                        emit!(writeln, "     error: {e}");
                    }
                    all &= c.pass();
                }
            }
            emit!(writeln, "report: {}", path.display());
            Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Multiplier { kind, n, k, param, l_max } => {
            let csv = commands::multiplier_csv(Dimension::new(n)?, kind, k, param, l_max)?;
            emit!(write, "{csv}");
            write_file(&out_dir(&cfg), "multiplier.csv", &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Pair { s, n, coeffs, constant } => {
            let (json, value) = commands::pair(Dimension::new(n)?, s, coeffs.as_deref(), constant)?;
            emit!(writeln, "(h_s, f) = {}", complex_str(value));
            write_file(&out_dir(&cfg), "pair.json", &to_pretty(&json))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Residue { k, n, coeffs, constant, radius, ring_size } => {
            let dim = Dimension::new(n)?;
            let r = commands::residue(
                dim,
                k,
                coeffs.as_deref(),
                constant,
                radius.unwrap_or(cfg.ring.radius),
                ring_size.unwrap_or(cfg.ring.size),
            )?;
            emit!(writeln, "residue in (s+n−1)/2 = {}", complex_str(r.half_parameter));
            emit!(writeln, "residue in s = {}", complex_str(r.residue));
            write_file(&out_dir(&cfg), "residue.json", &to_pretty(&r.json))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Trilinear { alpha, lambda, f1, f2, f3, method, k, n_theta, n_phi } => {
            let (params, from_lambda) = match (alpha, lambda) {
                (Some(a), None) => (ParameterTriple::from_alpha([a[0], a[1], a[2]]), false),
                (None, Some(l)) => (ParameterTriple::from_lambda([l[0], l[1], l[2]]), true),
                _ => anyhow::bail!("give exactly one of --alpha and --lambda"),
            };
            emit!(writeln, "{}", commands::echo_conversion(&params, from_lambda));
            let req = TrilinearRequest {
                params,
                from_lambda,
                files: [f1.as_deref(), f2.as_deref(), f3.as_deref()],
                method,
                k,
                n_theta: n_theta.unwrap_or(cfg.grid.n_theta),
                n_phi: n_phi.unwrap_or(cfg.grid.n_phi),
            };
            let json = commands::trilinear(&req)?;
            emit!(writeln, "{}", to_pretty(&json));
            write_file(&out_dir(&cfg), "trilinear.json", &to_pretty(&json))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::PoleScan { family, n, fixed, k, start, end, threshold } => {
            let dim = Dimension::new(n)?;
            let target = commands::scan_target(family, &fixed, k)?;
            let mut opts = ScanOptions::window(start, end);
            opts.threshold = threshold.unwrap_or(cfg.tolerances.poles);
            let json = commands::scan(dim, &target, &opts)?;
            emit!(writeln, "{}", to_pretty(&json));
            write_file(&out_dir(&cfg), "pole_scan.json", &to_pretty(&json))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).context("sphere-forms") {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
