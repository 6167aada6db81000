use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn transasym(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transasym"))
        .args(args)
        .current_dir(dir)
        .env_remove("TRANSASYM_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn predict_writes_one_entry_per_index() {
    let dir = tempfile::tempdir().unwrap();
    let out = transasym(dir.path(), &["predict", "p1", "--C", "12,0", "--n", "8..12"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let a = json(&dir.path().join("array.json"));
    assert_eq!(a["entries"].as_array().unwrap().len(), 5);
    assert_eq!(a["xi_s"], serde_json::json!([12.0, 0.0]));
    assert_eq!(a["entries"][0]["n"], 8);
}

#[test]
fn expand_then_eval_gives_h0_at_six() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(transasym(dir.path(), &["expand", "p1", "--M", "2", "--K", "32"]).status.code(), Some(0));
    let out = transasym(dir.path(), &["eval", "--xi", "6", "--m", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let re = v["value"][0].as_f64().unwrap();
    assert!((re - 24.0).abs() < 1e-6, "{re}");
    assert_eq!(v["value"][1].as_f64().unwrap(), 0.0);
}

#[test]
fn unknown_flag_is_a_usage_error_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = transasym(dir.path(), &["predict", "p1", "--C", "12,0", "--n", "8..12", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn malformed_complex_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = transasym(dir.path(), &["predict", "p1", "--C", "12;0", "--n", "8..12"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn domain_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(transasym(dir.path(), &["predict", "p1", "--C", "0,0", "--n", "1..3"]).status.code(), Some(2));
    assert_eq!(transasym(dir.path(), &["expand", "nosuch"]).status.code(), Some(2));
    assert_eq!(transasym(dir.path(), &["eval", "missing.json", "--xi", "1"]).status.code(), Some(2));
}

#[test]
fn bad_precision_variable_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_transasym"))
        .args(["system", "show", "p1"])
        .current_dir(dir.path())
        .env("TRANSASYM_PRECISION", "quad")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn artifacts_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |name: &str| {
        let exp = format!("exp_{name}.json");
        let arr = format!("array_{name}.json");
        assert_eq!(transasym(d, &["expand", "abel", "--M", "3", "--K", "24", "--out", &exp]).status.code(), Some(0));
        assert_eq!(transasym(d, &["predict", "abel", "--C", "1,0.5", "--n", "1..6", "--out", &arr]).status.code(), Some(0));
        (fs::read(d.join(exp)).unwrap(), fs::read(d.join(arr)).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn validate_writes_report_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = transasym(
        d,
        &["validate", "p1", "--C", "12,0", "--n", "8..9", "--report", "report.json", "--trajectory", "traj.csv", "--save-config", "cfg.json"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&d.join("report.json"));
    assert_eq!(r["pairs"].as_array().unwrap().len(), 2);
    assert!(r["max_delta"].as_f64().unwrap() <= 0.15);
    assert_eq!(r["observations"][0]["kind"], "DoublePole");
    let csv = fs::read_to_string(d.join("traj.csv")).unwrap();
    assert!(csv.starts_with("n,x_re,x_im,y1_re,y1_im,y2_re,y2_im\n"));
    let cfg = fs::read_to_string(d.join("cfg.json")).unwrap();
    let again = transasym(d, &["validate", "--config", "cfg.json", "--save-config", "cfg2.json"]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(fs::read_to_string(d.join("cfg2.json")).unwrap(), cfg);
    assert_eq!(json(&d.join("report.json")), r);
}

#[test]
fn continuation_and_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("path.json"), r#"{"waypoints": [[0.01, 0.0], [0.1, 0.05], [0.2, 0.1]]}"#).unwrap();
    assert_eq!(transasym(d, &["continue", "abel", "--path", "path.json"]).status.code(), Some(0));
    assert!(fs::read_to_string(d.join("continuation.csv")).unwrap().starts_with("xi_re,xi_im,y1_re,y1_im\n"));
    assert_eq!(transasym(d, &["report", "phase", "--steps", "5"]).status.code(), Some(0));
    let phase = fs::read_to_string(d.join("phase.csv")).unwrap();
    assert_eq!(phase.lines().count(), 26);
    assert!(phase.starts_with("X,Y,dX,dY\n"));
    assert_eq!(transasym(d, &["report", "gevrey", "p1", "--M", "4", "--K", "32"]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(d.join("gevrey.csv")).unwrap().lines().count(), 6);
}

#[test]
fn criterion_report_is_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = transasym(dir.path(), &["report", "criterion", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["A"][0].as_f64().unwrap() - 10.9).abs() < 1e-6);
}
