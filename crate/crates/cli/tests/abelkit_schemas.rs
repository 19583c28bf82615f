//! Every JSON artifact validates against its schema in docs/schemas.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn schema(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(name);
    let value: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    jsonschema::validator_for(&value).unwrap()
}

fn assert_valid(schema_name: &str, doc: &Value) {
    let v = schema(schema_name);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{schema_name}: {errors:#?}");
}

/// Runs the binary in a fresh output directory; returns the directory and
/// the exit code.
fn run(args: &[&str]) -> (tempfile::TempDir, Option<i32>, Vec<u8>) {
    let dir = tempfile::tempdir().unwrap();
    let out: PathBuf = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_abelkit"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    (dir, o.status.code(), o.stderr)
}

fn load(dir: &tempfile::TempDir, name: &str) -> Value {
    serde_json::from_slice(&std::fs::read(dir.path().join("out").join(name)).unwrap()).unwrap()
}

#[test]
fn analyze_report() {
    for extra in [&["--f3", "x^2+1", "--f2", "x^2+1", "--f1", "0.3*sin(x)"][..], &["--f0", "x", "--f3", "2+cos(x)"]] {
        let (dir, code, _) = run(&[&["analyze"][..], extra].concat());
        assert_eq!(code, Some(0));
        assert_valid("analyze.schema.json", &load(&dir, "analyze.json"));
    }
}

#[test]
fn solve_const_report() {
    for args in [
        &["solve-const", "--A3", "1", "--y0", "1", "--x-max", "1"][..],
        &["solve-const", "--A0", "1", "--A3", "1", "--y0", "0.5"],
        &["solve-const", "--A1=-1", "--A3", "1", "--y0", "1"],
    ] {
        let (dir, code, _) = run(args);
        assert_eq!(code, Some(0), "{args:?}");
        assert_valid("solve_const_report.schema.json", &load(&dir, "solve_const_report.json"));
    }
}

#[test]
fn vein_reports() {
    let (dir, code, _) = run(&["vein", "solve", "--family", "2"]);
    assert_eq!(code, Some(0));
    assert_valid("vein_solve_report.schema.json", &load(&dir, "vein_solve_report.json"));
    let (dir, code, _) = run(&["vein", "check", "--a", "2", "--b", "1"]);
    assert_eq!(code, Some(0));
    assert_valid("vein_check.schema.json", &load(&dir, "vein_check.json"));
}

#[test]
fn fixed_point_reports() {
    for (a, b) in [("1", "-2"), ("1", "1"), ("-1", "1")] {
        let (dir, code, _) = run(&["oscillator", "portrait", "--a", a, "--b", b, "--grid", "2x2", "--zeta-max", "5"]);
        assert_eq!(code, Some(0));
        assert_valid("fixed_points.schema.json", &load(&dir, "fixed_points.json"));
    }
}

#[test]
fn json_tables() {
    let (dir, code, _) = run(&["oscillator", "portrait", "--grid", "2x2", "--zeta-max", "5", "--format", "json"]);
    assert_eq!(code, Some(0));
    for name in ["trajectories.json", "isoclines.json", "coefficients.json"] {
        assert_valid("table.schema.json", &load(&dir, name));
    }
}

#[test]
fn error_reports() {
    for args in [&["analyze", "--f3", "x^0.5"][..], &["phi", "--samples", "0"], &["vein", "solve", "--a", "0", "--b", "0"]] {
        let (_, code, stderr) = run(args);
        assert_eq!(code, Some(2));
        assert_valid("error.schema.json", &serde_json::from_slice(&stderr).unwrap());
    }
}

#[test]
fn verify_report() {
    let (dir, code, _) = run(&["verify"]);
    // exit status mirrors the suite; the report is written either way
    assert!(matches!(code, Some(0) | Some(1)));
    let doc = load(&dir, "verify.json");
    assert_valid("verify.schema.json", &doc);
    assert_eq!(doc["passed"].as_bool().unwrap(), code == Some(0));
}
