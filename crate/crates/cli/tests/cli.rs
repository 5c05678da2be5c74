use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sphere-forms"));
    c.env_remove("SPHERE_FORMS_OUT");
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn type_ok(v: &Value, t: &str) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "integer" => v.is_u64() || v.is_i64(),
        "number" => v.is_number(),
        _ => panic!("schema type {t} not handled"),
    }
}

/// The subset of JSON Schema used by the published report schema:
/// `type`, `required`, `properties`, `items`.
fn validate(v: &Value, schema: &Value, at: &str) -> Vec<String> {
    let mut errs = Vec::new();
    if let Some(t) = schema.get("type") {
        let ok = match t {
            Value::String(s) => type_ok(v, s),
            Value::Array(a) => a.iter().any(|s| type_ok(v, s.as_str().unwrap())),
            _ => panic!("bad schema type"),
        };
        if !ok {
            errs.push(format!("{at}: expected {t}, got {v}"));
            return errs;
        }
    }
    if let Some(req) = schema.get("required").and_then(Value::as_array) {
        for r in req {
            let key = r.as_str().unwrap();
            if v.get(key).is_none() {
                errs.push(format!("{at}: missing {key}"));
            }
        }
    }
    if let Some(props) = schema.get("properties").and_then(Value::as_object) {
        for (k, s) in props {
            if let Some(x) = v.get(k) {
                errs.extend(validate(x, s, &format!("{at}.{k}")));
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            errs.extend(validate(x, items, &format!("{at}[{i}]")));
        }
    }
    errs
}

fn schema() -> Value {
    read_json(&Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/verify_report.schema.json"))
}

fn strip_timings(v: &mut Value) {
    if let Some(o) = v.as_object_mut() {
        o.remove("seconds");
        o.remove("total_seconds");
        o.values_mut().for_each(strip_timings);
    } else if let Some(a) = v.as_array_mut() {
        a.iter_mut().for_each(strip_timings);
    }
}

#[test]
fn pair_of_constant_at_two_is_eight_pi() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["pair", "--s", "2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let expected = format!("{:.11e}", 8.0 * std::f64::consts::PI).replace('e', "e+");
    assert!(stdout(&o).contains(&expected), "{}", stdout(&o));
    let json = read_json(&dir.path().join("pair.json"));
    assert_eq!(json["value"][0].to_string(), expected);
}

#[test]
fn residue_of_constant_at_k0_is_pi() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["residue", "--k", "0"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("residue in (s+n−1)/2 = 3.14159265359e+0"), "{}", stdout(&o));
    let json = read_json(&dir.path().join("residue.json"));
    for key in ["center", "radius", "residue", "regular", "condition"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    let re: f64 = json["residue"][0].as_f64().unwrap();
    assert!((re - 2.0 * std::f64::consts::PI).abs() < 1e-9);
}

#[test]
fn residue_of_constant_in_dimension_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["residue", "--k", "0", "--n", "4"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let json = read_json(&dir.path().join("residue.json"));
    let half = json["half_parameter_residue"][0].as_f64().unwrap();
    let target = json["c_k_delta_k_f_at_base"][0].as_f64().unwrap();
    assert!((half - target).abs() < 1e-8 * target.abs(), "{half} vs {target}");
}

#[test]
fn trilinear_lambda_input_echoes_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["trilinear", "--lambda", "3", "2.5", "2", "--n-theta", "8", "--n-phi", "16"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("→ α = (1.50000000000e+0"), "{text}");
    let json = read_json(&dir.path().join("trilinear.json"));
    assert_eq!(json["input"], "lambda");
    assert_eq!(json["method"], "direct");
    let alpha: Vec<f64> = (0..3).map(|i| json["alpha"][i][0].as_f64().unwrap()).collect();
    assert_eq!(alpha, vec![1.5, 2.5, 3.5]);
    assert!(json["truncation_error_estimate"].is_number());
    assert_eq!(json["grid"]["n_theta"], 8);
}

#[test]
fn trilinear_with_coefficient_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    std::fs::write(&f, r#"{"n": 3, "L": 2, "coeffs": [[0, 0, 1.0, 0.0], [2, 1, 0.3, -0.2], [2, -1, -0.3, -0.2]]}"#).unwrap();
    let fp = f.to_str().unwrap();
    let args = ["trilinear", "--alpha", "2.3", "1.7", "2.9", "--f1", fp, "--f2", fp, "--n-theta", "8", "--n-phi", "16"];
    let direct = run(&args, dir.path());
    assert!(direct.status.success(), "{}", stderr(&direct));
    let d = read_json(&dir.path().join("trilinear.json"))["value"][0].as_f64().unwrap();
    let mut fast_args = args.to_vec();
    fast_args.extend(["--method", "fast"]);
    let fast = run(&fast_args, dir.path());
    assert!(fast.status.success(), "{}", stderr(&fast));
    let v = read_json(&dir.path().join("trilinear.json"))["value"][0].as_f64().unwrap();
    assert!((d - v).abs() < 1e-6 * d.abs(), "{d} vs {v}");
}

#[test]
fn multiplier_csv_goes_to_env_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["multiplier", "--kind", "gjms", "--k", "1", "--L", "3"])
        .env("SPHERE_FORMS_OUT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("multiplier.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "l,re,im");
    assert_eq!(lines.len(), 5);
    // Δ₁ on S²: −l(l+1) + 0
    assert_eq!(lines[2], "1,-2.00000000000e+0,0.00000000000e+0");
}

#[test]
fn verify_passes_and_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--suite", "geometry", "--suite", "residues", "--instances", "2"], dir.path());
    assert!(o.status.success(), "{}\n{}", stdout(&o), stderr(&o));
    let report = read_json(&dir.path().join("verify_report.json"));
    let errs = validate(&report, &schema(), "$");
    assert!(errs.is_empty(), "{errs:?}");
    assert_eq!(report["pass"], true);
    let suites: Vec<&str> = report["suites"].as_array().unwrap().iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(suites, vec!["geometry", "residues"]);
    for s in report["suites"].as_array().unwrap() {
        for c in s["checks"].as_array().unwrap() {
            assert!(!c["anchor"].as_str().unwrap().is_empty());
        }
    }
}

#[test]
fn fault_injection_fails_the_residue_suite() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--suite", "residues", "--instances", "2", "--fault-inject"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let report = read_json(&dir.path().join("verify_report.json"));
    assert!(validate(&report, &schema(), "$").is_empty());
    assert_eq!(report["pass"], false);
    let checks = report["suites"][0]["checks"].as_array().unwrap();
    let failing: Vec<&str> =
        checks.iter().filter(|c| c["pass"] == false).map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(failing, vec!["residue_k1"]);
    assert!(stdout(&o).contains("FAIL residues/residue_k1"));
}

#[test]
fn reports_are_deterministic_up_to_timings() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = a.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 99, "instances": 2, "L": 8}"#).unwrap();
    let args = ["verify", "--suite", "geometry", "--suite", "bernstein", "--config", cfg.to_str().unwrap()];
    assert!(run(&args, a.path()).status.success());
    assert!(run(&args, b.path()).status.success());
    let mut ra = read_json(&a.path().join("verify_report.json"));
    let mut rb = read_json(&b.path().join("verify_report.json"));
    assert_eq!(ra["config"]["seed"], 99);
    strip_timings(&mut ra);
    strip_timings(&mut rb);
    assert_eq!(ra, rb);
}

#[test]
fn invalid_input_is_explained() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--suite", "nonsense"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("available suites"), "{}", stderr(&o));

    let o = run(&["trilinear", "--alpha", "2", "3", "4", "--method", "singular"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--k"), "{}", stderr(&o));

    let o = run(&["trilinear", "--alpha", "-0.9", "2", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("convergent region"), "{}", stderr(&o));

    let o = run(&["trilinear", "--alpha", "1", "3.5", "-3", "--method", "singular", "--k", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("meromorphic continuation"), "{}", stderr(&o));

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"tolerances": {"residues": 0}}"#).unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("residues"), "{}", stderr(&o));

    let o = run(&["multiplier", "--kind", "riesz"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--param"), "{}", stderr(&o));
}

#[test]
fn pole_scan_reports_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["pole-scan", "--family", "alpha3", "--fixed", "0.6", "0.4", "--start", "-4", "--end", "0.5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let json = read_json(&dir.path().join("pole_scan.json"));
    let found: Vec<f64> = json["detected"].as_array().unwrap().iter().map(|p| p["position"].as_f64().unwrap()).collect();
    let expected: Vec<f64> = json["expected"].as_array().unwrap().iter().map(|p| p.as_f64().unwrap()).collect();
    assert_eq!(found.len(), expected.len(), "{found:?} vs {expected:?}");
    for (f, e) in found.iter().zip(&expected) {
        assert!((f - e).abs() < 1e-6);
    }
    let families: Vec<&str> = json["detected"].as_array().unwrap().iter().map(|p| p["family"].as_str().unwrap()).collect();
    assert_eq!(families, vec!["sum", "alpha3", "sum", "alpha3"]);
}
