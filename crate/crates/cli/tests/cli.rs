use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn lipfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipfree")).args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    root.to_str().unwrap().to_string()
}

#[test]
fn bm_report_on_the_interval() {
    let out = lipfree(&["--command", "bm-report", "--d", "1", "--alpha", "0.5", "--p", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    // at p = 1, α = 1/2: ρ = 1 + 2/(√2 − 1), τ = 4/(1 − 2^{-1/2})²
    let (rho, tau) = (r["rho"].as_f64().unwrap(), r["tau"].as_f64().unwrap());
    let s = 2f64.sqrt();
    assert!((rho - (1.0 + 2.0 / (s - 1.0))).abs() < 1e-12);
    assert!((tau - 4.0 * (1.0 / (1.0 - 1.0 / s)).powi(2)).abs() < 1e-9);
    assert!((r["bm_bound"].as_f64().unwrap() - rho * tau).abs() < 1e-9);
}

#[test]
fn retraction_witness_on_the_square() {
    let args = ["--command", "retraction-verify", "--d", "2", "--p", "0.5", "--seed", "11", "--samples", "300"];
    let out = lipfree(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert!((r["witness_value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(r["status"], "ok");
    // byte-stable
    assert_eq!(lipfree(&args).stdout, out.stdout);
}

#[test]
fn malformed_element_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.elem");
    std::fs::write(&bad, "1.0 1\nnot an element line\n").unwrap();
    let out = lipfree(&["--command", "norm", "--in", &data("square.pts"), "--element", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn norm_report_brackets_the_norm() {
    let out = lipfree(&["--command", "norm", "--in", &data("square.pts"), "--element", &data("square.elem"), "--p", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let (lo, v, hi) = (r["lower_bound"].as_f64().unwrap(), r["norm"].as_f64().unwrap(), r["upper_bound"].as_f64().unwrap());
    assert!(lo <= v + 1e-12 && v <= hi + 1e-12);
    assert_eq!(r["method"], "enumeration");
}

#[test]
fn decompose_reproduces_the_element() {
    let out = lipfree(&["--command", "decompose", "--in", &data("square.pts"), "--element", &data("square.elem")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(report(&out)["max_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out_path = dir.path().join("report.json");
    std::fs::write(&cfg, r#"{"command": "basis-verify", "d": 2, "kmax": 1, "p": 0.5, "alpha": 0.25}"#).unwrap();
    let out = lipfree(&["--config", cfg.to_str().unwrap(), "--d", "1", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["d"], 1);
    assert_eq!(r["k_max"], 1);
    assert_eq!(r["alpha"].as_f64(), Some(0.25));
}

#[test]
fn lambda_check_on_a_file_complex() {
    let out = lipfree(&["--command", "lambda-check", "--in", &data("lshape.cplx"), "--samples", "500"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["kronecker_exact"], true);
}

#[test]
fn missing_command_and_bad_ranges_exit_two() {
    assert_eq!(lipfree(&["--p", "0.5"]).status.code(), Some(2));
    assert_eq!(lipfree(&["--command", "bm-report", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(lipfree(&["--command", "basis-verify", "--kmax", "40"]).status.code(), Some(2));
}
