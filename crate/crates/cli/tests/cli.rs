use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn phasefield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasefield")).args(args).output().expect("binary runs")
}

fn run_in(dir: &Path, experiment: &str, extra: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut args = vec![experiment, "--out", out];
    args.extend_from_slice(extra);
    phasefield(&args)
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn fock_ccr_small_cutoff_passes() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), "fock-ccr", &["--override", "d=1", "--override", "N_max=12"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert!(num(&r["checks"]["ccr_residual"]["value"]) <= 1e-10);
    assert_eq!(r["parameters"]["N_max"], Value::from(12));
    let csv = std::fs::read_to_string(dir.path().join("fock_residuals.csv")).unwrap();
    assert!(csv.starts_with("d,N_max,check_name,residual\n"));
    assert_eq!(r["files"], serde_json::json!(["fock_residuals.csv"]));
}

#[test]
fn unknown_experiment_is_a_schema_error() {
    assert_eq!(phasefield(&["no-such-experiment"]).status.code(), Some(2));
}

#[test]
fn malformed_configs_are_schema_errors() {
    let dir = TempDir::new().unwrap();
    let bad_key = run_in(dir.path(), "hs-scan", &["--override", "lambda=1"]);
    assert_eq!(bad_key.status.code(), Some(2));
    let bad_type = run_in(dir.path(), "hs-scan", &["--override", "sizes=four"]);
    assert_eq!(bad_type.status.code(), Some(2));
    let bad_family = run_in(dir.path(), "hs-scan", &["--override", "family=stretch"]);
    assert_eq!(bad_family.status.code(), Some(2));

    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment": "metric-suite"}"#).unwrap();
    let mismatch = run_in(dir.path(), "hs-scan", &["--config", cfg.to_str().unwrap()]);
    assert_eq!(mismatch.status.code(), Some(2));
    std::fs::write(&cfg, "[1, 2]").unwrap();
    let not_object = run_in(dir.path(), "hs-scan", &["--config", cfg.to_str().unwrap()]);
    assert_eq!(not_object.status.code(), Some(2));
    let missing = run_in(dir.path(), "hs-scan", &["--config", "/nonexistent/cfg.json"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn hs_scan_matches_the_squeezing_formula() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"experiment": "hs-scan", "sizes": [2, 4, 8, 16], "r": 1.0}"#).unwrap();
    let out = run_in(dir.path(), "hs-scan", &["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    let norms = r["values"]["hs_norms"].as_array().unwrap();
    for (d, n) in [2.0f64, 4.0, 8.0, 16.0].iter().zip(norms) {
        assert!((num(n) - 2.0 * 2f64.sqrt() * 1f64.sinh() * d.sqrt()).abs() <= 1e-10);
    }
    assert_eq!(r["values"]["trend"], Value::from("growing"));
    let csv = std::fs::read_to_string(dir.path().join("hs_scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("size,hs_norm\n"));
}

#[test]
fn overrides_win_over_the_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"sizes": [2, 4], "r": 0.5, "seed": 9}"#).unwrap();
    let out = run_in(dir.path(), "hs-scan", &["--config", cfg.to_str().unwrap(), "--override", "r=2", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(num(&r["parameters"]["r"]), 2.0);
    assert_eq!(r["seed"], Value::from(4));
    assert_eq!(r["parameters"]["sizes"], serde_json::json!([2, 4]));
}

#[test]
fn identical_configs_give_identical_bytes() {
    for (experiment, extra) in [
        ("fock-ccr", vec!["--override", "d=2", "--override", "N_max=6"]),
        ("moyal-covariance", vec!["--override", "max_degree=3"]),
        ("metric-suite", vec!["--override", "triples=50"]),
    ] {
        let (a, b, c) = (TempDir::new().unwrap(), TempDir::new().unwrap(), TempDir::new().unwrap());
        let mut seeded = extra.clone();
        seeded.extend(["--seed", "5"]);
        assert_eq!(run_in(a.path(), experiment, &seeded).status.code(), Some(0));
        assert_eq!(run_in(b.path(), experiment, &seeded).status.code(), Some(0));
        let read = |d: &TempDir| std::fs::read(d.path().join("report.json")).unwrap();
        assert_eq!(read(&a), read(&b), "{experiment}");
        let mut reseeded = extra.clone();
        reseeded.extend(["--seed", "6"]);
        assert_eq!(run_in(c.path(), experiment, &reseeded).status.code(), Some(0));
        assert_ne!(read(&a), read(&c), "{experiment}");
    }
}

#[test]
fn numerical_guard_exits_three() {
    let dir = TempDir::new().unwrap();
    // Courant ratio above one
    let out = run_in(dir.path(), "covariant-propagator", &["--override", "dt=1.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Courant"));
}

#[test]
fn failed_check_exits_one_and_still_reports() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), "phi4-evolve", &["--override", "dt=0.05", "--override", "t=2"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(dir.path());
    assert_eq!(r["passed"], Value::Bool(false));
    assert_eq!(r["checks"]["energy_drift"]["passed"], Value::Bool(false));
}

#[test]
fn every_experiment_runs_with_defaults() {
    for experiment in [
        "linear-evolve",
        "complex-structure",
        "fock-ccr",
        "hs-scan",
        "phi4-evolve",
        "moyal-covariance",
        "covariant-propagator",
        "metric-suite",
    ] {
        let dir = TempDir::new().unwrap();
        let out = run_in(dir.path(), experiment, &[]);
        assert_eq!(out.status.code(), Some(0), "{experiment}: {}", String::from_utf8_lossy(&out.stderr));
        let r = report(dir.path());
        assert_eq!(r["experiment"], Value::from(experiment));
        for file in r["files"].as_array().unwrap() {
            assert!(dir.path().join(file.as_str().unwrap()).exists());
        }
    }
}

#[test]
fn kernel_and_sweep_csv_columns() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), "covariant-propagator", &["--override", "N=8", "--override", "T=10"]);
    assert_eq!(out.status.code(), Some(0));
    let kernel = std::fs::read_to_string(dir.path().join("retarded_kernel.csv")).unwrap();
    assert!(kernel.starts_with("t,x,value\n"));
    assert_eq!(kernel.lines().count(), 1 + 8 * 10);

    let sweep_dir = TempDir::new().unwrap();
    let out = run_in(sweep_dir.path(), "moyal-covariance", &["--override", "max_degree=2", "--override", "epsilon=0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let sweep = std::fs::read_to_string(sweep_dir.path().join("moyal_sweep.csv")).unwrap();
    assert!(sweep.starts_with("f_degree,g_degree,map_name,epsilon,residual_max\n"));
    // 3 × 3 degree pairs, two maps each
    assert_eq!(sweep.lines().count(), 1 + 18);
    let r = report(sweep_dir.path());
    assert!(num(&r["values"]["cubic_shear_residual_max"]) > 0.0);
}
