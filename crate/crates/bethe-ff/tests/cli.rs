//! End-to-end checks of the command-line interface: exit codes, output
//! formats, and byte-stability.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bethe-ff"))
}

fn write_model(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("bethe-ff-test-{name}.json"));
    std::fs::write(&path, contents).unwrap();
    path
}

fn qnls_model() -> PathBuf {
    write_model("qnls", r#"{"kind":"qnls","L":10.0,"c":1.0}"#)
}

fn xxx_model() -> PathBuf {
    write_model(
        "xxx",
        r#"{"kind":"xxx","M":4,"xi":[[0.04,0.0],[-0.06,0.0],[0.02,0.0],[0.0,0.0]]}"#,
    )
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn solve_qnls_succeeds_and_embeds_version() {
    let model = qnls_model();
    let out = run(&["solve", "--model", model.to_str().unwrap(), "--qn", "-1,0,1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["model"]["kind"], "qnls");
    assert!(v["residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["roots"].as_array().unwrap().len(), 3);
}

#[test]
fn solve_single_zero_quantum_number_gives_zero_root() {
    let model = qnls_model();
    let out = run(&["solve", "--model", model.to_str().unwrap(), "--qn", "0"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let root = v["roots"][0].as_array().unwrap();
    assert!(root[0].as_f64().unwrap().abs() < 1e-14);
    assert!(root[1].as_f64().unwrap().abs() < 1e-14);
}

#[test]
fn malformed_model_is_usage_error() {
    let model = write_model("broken", r#"{"kind":"qnls"}"#);
    let out = run(&["solve", "--model", model.to_str().unwrap(), "--qn", "0"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["solve", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn unknown_suite_is_usage_error() {
    let out = run(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn verify_suite_is_byte_stable() {
    let a = run(&["verify", "--suite", "kernels", "--seed", "3"]);
    let b = run(&["verify", "--suite", "kernels", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 3);
    assert_eq!(v["passed"], true);
}

#[test]
fn q1_csv_grid_has_header() {
    let model = qnls_model();
    let out = run(&[
        "formfactor", "--model", model.to_str().unwrap(), "--kind", "q1",
        "--mu-qn", "0", "--lambda-qn", "1", "--x", "10.0", "--steps", "5",
        "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,re,im"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn psi_reports_both_representations() {
    let model = qnls_model();
    let out = run(&[
        "formfactor", "--model", model.to_str().unwrap(), "--kind", "psi",
        "--mu-qn", "0", "--lambda-qn", "-0.5,1.5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["relative_gap"].as_f64().unwrap() <= 1e-9);
    assert!(v["value"].is_array());
    assert!(v["value_sigma_representation"].is_array());
}

#[test]
fn sigma_minus_emits_one_row_per_site() {
    let model = xxx_model();
    let out = run(&[
        "formfactor", "--model", model.to_str().unwrap(), "--kind", "sigma-minus",
        "--mu-seeds", "0.35,-0.35", "--lambda-seeds", "0.15",
        "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,re,im"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn scalar_product_dual_representation_agrees() {
    let model = xxx_model();
    let out = run(&[
        "scalar-product", "--model", model.to_str().unwrap(),
        "--mu-seeds", "0.35,-0.35", "--nu", "0.1:0.2,-0.3:0.1", "--dual",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["relative_gap"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn kernels_subcommand_evaluates_all_four() {
    let out = run(&["kernels", "--a", "0.4:0.3", "--b", "-0.2:0.1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for name in ["f", "g", "h", "t"] {
        assert!(v[name].is_array(), "missing kernel {name}");
    }
    // h = f/g at this point
    let get = |n: &str| {
        let a = v[n].as_array().unwrap();
        num_complex::Complex64::new(a[0].as_f64().unwrap(), a[1].as_f64().unwrap())
    };
    assert!((get("h") * get("g") - get("f")).norm() < 1e-13);
}

#[test]
fn out_flag_writes_file() {
    let model = qnls_model();
    let target = std::env::temp_dir().join("bethe-ff-test-out.json");
    let _ = std::fs::remove_file(&target);
    let out = run(&[
        "solve", "--model", model.to_str().unwrap(), "--qn", "0",
        "--out", target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["model"]["kind"], "qnls");
}
