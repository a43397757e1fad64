use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_autoforma"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn autoforma")
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_canonical_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("canonical.json");
    let out = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = read_json(dir.path().join("report.json"));
    assert_eq!(report["passed"], Value::Bool(true));
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["pass"] == Value::Bool(true)));
    assert!(dir.path().join("timings.json").exists());
}

#[test]
fn verify_reports_integrality_violation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("non_integral.json");
    let out = run(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let report = read_json(dir.path().join("report.json"));
    let integrality = &report["equivariance"]["integrality"];
    assert_eq!(integrality["ok"], Value::Bool(false));
    let entry = integrality["table"][0][1].as_f64().unwrap();
    assert!((entry - 2.0 / std::f64::consts::PI).abs() < 1e-12);
    assert!(report["forms"].is_null());
}

#[test]
fn reports_are_byte_identical() {
    let cfg = config("canonical.json");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let out = run(&[
            "verify",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(dirs[0].path().join("report.json")).unwrap();
    let b = std::fs::read(dirs[1].path().join("report.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sample_grid_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: Value = read_json(config("canonical.json"));
    cfg["grid"] = serde_json::json!({"nx": 64, "ny": 64});
    let cfg_path = dir.path().join("grid.json");
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let out = run(&[
        "sample",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("sample_mixed.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 64 * 64 + 1);
    assert_eq!(lines[0], "x,y,re,im,abs");
    for line in &lines[1..] {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), 5);
        assert!((fields[2].hypot(fields[3]) - fields[4]).abs() < 1e-12);
    }
}

#[test]
fn zero_mu_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: Value = read_json(config("canonical.json"));
    cfg["mu"] = serde_json::json!(0);
    let cfg_path = dir.path().join("mu0.json");
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let out = run(&["verify", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`mu`"));
}

#[test]
fn malformed_json_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.json");
    std::fs::write(&cfg_path, "{\n  \"nu\": 1,\n  \"mu\": ]\n}").unwrap();
    let out = run(&["validate", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn missing_config_is_an_io_error() {
    let out = run(&["validate", "--config", "/nonexistent/autoforma.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn tolerance_override_is_validated() {
    let cfg = config("canonical.json");
    let out = run(&["build", "--config", cfg.to_str().unwrap(), "--tol", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "build",
        "--config",
        cfg.to_str().unwrap(),
        "--tol",
        "1e-6",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn stage_subcommands() {
    let cfg = config("canonical.json");
    let bad = config("non_integral.json");
    for sub in ["validate", "weight", "phi", "character", "build"] {
        let out = run(&[sub, "--config", cfg.to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{sub}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let _: Value = serde_json::from_slice(&out.stdout).unwrap();
    }
    for sub in ["validate", "character", "build"] {
        assert_eq!(
            run(&[sub, "--config", bad.to_str().unwrap()]).status.code(),
            Some(3),
            "{sub}"
        );
    }
}

#[test]
fn anti_holomorphic_tau_verifies() {
    let cfg = config("conjugate.json");
    let out = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}
