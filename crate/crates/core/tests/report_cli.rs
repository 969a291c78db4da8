use std::path::Path;
use std::process::{Command, Output};

use hardy_cones::report::{
    body_json, emit_report, parse_config, parse_report_json, run_pipeline, CheckKind, OutputFormat,
    CONSTANTS_HEADER,
};

const HEMISPHERE: &str = "mu = [0, 0.25]\n[cone]\nkind = \"cap\"\nn = 3\nalpha_over_pi = 0.5\n";

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn csv_header(path: &Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.headers().unwrap().iter().map(String::from).collect()
}

#[test]
fn pipeline_constants() {
    let config = parse_config(HEMISPHERE).unwrap();
    let report = run_pipeline(&config);
    assert!(report.body.errors.is_empty());
    assert_eq!(report.exit_code(), 0);
    let lambdas: Vec<f64> = report.body.constants.iter().map(|c| c.lambda).collect();
    assert!((lambdas[0] - 2.25).abs() < 1e-6 && (lambdas[1] - 1.0).abs() < 1e-3, "{lambdas:?}");
    assert_eq!(report.body.mu0.as_ref().unwrap().mu0, 0.25);
    assert!(report.body.convergence.iter().any(|r| r.quantity == "sigma"));
}

#[test]
fn report_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = parse_config(HEMISPHERE).unwrap();
    config.verify.checks = vec![CheckKind::Annulus, CheckKind::RadialNullSequence];
    let report = run_pipeline(&config);
    let written = emit_report(&report, dir.path(), OutputFormat::Both).unwrap();
    assert_eq!(written.len(), 4);
    let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert_eq!(parse_report_json(&text).unwrap(), report);
    assert_eq!(csv_header(&dir.path().join("constants.csv")), CONSTANTS_HEADER);
    assert_eq!(csv_header(&dir.path().join("verification.csv"))[0], "check");
    let rows = csv::Reader::from_path(dir.path().join("constants.csv")).unwrap().records().count();
    assert_eq!(rows, 2);
}

#[test]
fn bodies_depend_only_on_config_and_seed() {
    let mut config = parse_config(HEMISPHERE).unwrap();
    config.verify.checks = CheckKind::ALL.to_vec();
    let a = body_json(&run_pipeline(&config)).unwrap();
    assert_eq!(a, body_json(&run_pipeline(&config)).unwrap());
    config.verify.seed += 1;
    assert_ne!(a, body_json(&run_pipeline(&config)).unwrap());
}

#[test]
fn cli_report_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), HEMISPHERE);
    let out = dir.path().join("out");
    let o = hardy(&["report", "--config", &cfg, "--out", out.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("convergence.csv").exists());
    assert!(!out.join("report.json").exists());
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "mu = [0]\n[cone]\nkind = \"sector\"\nalpha = 7\n");
    assert_eq!(hardy(&["constants", "--config", &bad]).status.code(), Some(2));
    assert_eq!(hardy(&["constants"]).status.code(), Some(2));
    let good = write_config(dir.path(), HEMISPHERE);
    assert_eq!(hardy(&["report", "--config", &good]).status.code(), Some(2));
    assert_eq!(hardy(&["ftt", "--alphas=0.2,0"]).status.code(), Some(2));
}

#[test]
fn cli_json_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), HEMISPHERE);
    let o = hardy(&["mu0", "--config", &cfg, "--levels", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mu0"], 0.25);

    let o = hardy(&["ftt", "--alphas=-0.3,-0.2,0", "--samples", "20"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["class"], "critical");

    let o = hardy(&["domain-check", "--dim", "2", "--samples", "500"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
}
