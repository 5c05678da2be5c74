//! Output formatting. Every real number is written in scientific notation
//! with 12 significant digits and a signed exponent, e.g. `2.51327412287e+1`;
//! JSON numbers keep that text.

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde_json::{Number, Value};
use std::path::{Path, PathBuf};

pub const OUT_DIR_ENV: &str = "SPHERE_FORMS_OUT";

pub fn sci_str(x: f64) -> String {
    // −0 prints as 0
    let x = if x == 0.0 { 0.0 } else { x };
    let s = format!("{x:.11e}");
    match s.split_once('e') {
        Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
        _ => s,
    }
}

/// A JSON number carrying the 12-digit text; non-finite values become `null`.
pub fn sci(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(sci_str(x).parse::<Number>().expect("formatted float is a JSON number"))
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![sci(z.re), sci(z.im)])
}

pub fn complex_str(z: Complex64) -> String {
    format!("{} {}i", sci_str(z.re), sci_str(z.im))
}

/// Rewrites every non-integer number of `v` in the 12-digit form.
pub fn normalize_numbers(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    *v = sci(x);
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(normalize_numbers),
        Value::Object(o) => o.values_mut().for_each(normalize_numbers),
        _ => {}
    }
}

pub fn to_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

/// `--out`, then the config, then `$SPHERE_FORMS_OUT`, then the working directory.
pub fn output_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.map(Path::to_path_buf))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
