//! End-to-end runs of the `weylreduce` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_weylreduce"));
    c.env_remove("WEYLREDUCE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("weylreduce-it-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn catalog_lists_actions_and_functions() {
    let out = run(&["catalog", "--roots"]);
    assert!(out.status.success());
    let v = json(&out);
    let ids: Vec<&str> = v["actions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a["id"].as_str().unwrap())
        .collect();
    for id in ["conj-su2", "adj-su2", "sym-s2", "sym-h2", "hermann-s2"] {
        assert!(ids.contains(&id), "{ids:?}");
    }
    let h = v["actions"].as_array().unwrap().iter().find(|a| a["id"] == "hermann-s2").unwrap();
    assert_eq!(h["closed_form"], false);
    assert!(v["actions"][0]["roots"].is_object());
    let csv = run(&["catalog", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("id,kind,group,"));
    assert_eq!(text.lines().count(), ids.len() + 1);
}

#[test]
fn validate_passes_and_fails_on_threshold() {
    let out = run(&["validate", "--action", "conj-su2", "--n", "100", "--margin", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["report"]["max_abs_rel_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["passed"], true);
    let out = run(&["validate", "--action", "sym-s3", "--n", "20", "--threshold", "1e-300"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn sweep_csv_has_header_and_grid_rows() {
    let out = run(&["sweep", "--action", "conj-su2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("coord,delta_numeric,delta_closed"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 256);
    for r in &rows {
        assert!((r[1] - r[2]).abs() < 1e-12 * (1.0 + r[2]), "{r:?}");
    }
}

#[test]
fn hermann_sweep_has_no_closed_form_column_values() {
    let out = run(&["sweep", "--action", "hermann-s2", "--grid", "8", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for l in text.lines().skip(1) {
        assert!(l.ends_with(','), "{l}");
    }
}

#[test]
fn integrate_exit_codes() {
    let ok = run(&["integrate", "--action", "conj-su2", "--function", "abs_trace_sq", "--n", "20000"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    for key in ["action", "function", "method", "value", "stderr", "n", "seed", "order", "c", "weyl_order"] {
        assert!(results[0].get(key).is_some(), "missing {key}");
    }
    assert!((results[1]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let strict = run(&[
        "integrate", "--action", "conj-su2", "--function", "abs_trace_sq", "--n", "20000", "--threshold", "1e-9",
    ]);
    assert_eq!(strict.status.code(), Some(2));
    let usage = run(&["integrate", "--action", "conj-su2", "--function", "gaussian"]);
    assert_eq!(usage.status.code(), Some(1));
    assert!(!usage.stderr.is_empty());
}

#[test]
fn seed_comes_from_environment_when_not_given() {
    let args = ["integrate", "--action", "conj-su2", "--function", "abs_trace_sq", "--n", "5000"];
    let env = bin().args(args).env("WEYLREDUCE_SEED", "77").output().unwrap();
    let v = json(&env);
    assert_eq!(v["config"]["seed"], 77);
    let flag = run(&[&args[..], &["--seed", "77"]].concat());
    assert_eq!(json(&flag)["results"], v["results"]);

    let dir = scratch("seed");
    let cfg = dir.join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 5}"#).unwrap();
    let file = bin()
        .args(args)
        .args(["--config", cfg.to_str().unwrap()])
        .env("WEYLREDUCE_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(json(&file)["config"]["seed"], 5);
    let bad = bin().args(args).env("WEYLREDUCE_SEED", "seven").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn report_reruns_bit_identically_from_its_config() {
    let dir = scratch("rerun");
    let first = dir.join("first.json");
    let out = run(&[
        "integrate", "--action", "conj-su3", "--function", "abs_g12_sq", "--n", "30000", "--order", "16",
        "--seed", "9", "--out", first.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    assert_eq!(report["results"][1]["method"], "reduced_general");

    let second = dir.join("second.json");
    let mut cfg = report["config"].clone();
    cfg["output"] = Value::String(second.to_str().unwrap().into());
    let cfg_path = dir.join("cfg.json");
    std::fs::write(&cfg_path, cfg.to_string()).unwrap();
    let out = run(&["--config", cfg_path.to_str().unwrap()]);
    assert!(out.status.success());
    let again: Value = serde_json::from_str(&std::fs::read_to_string(&second).unwrap()).unwrap();
    for k in 0..2 {
        for key in ["value", "stderr"] {
            let a = report["results"][k][key].as_f64().unwrap();
            let b = again["results"][k][key].as_f64().unwrap();
            assert_eq!(a.to_bits(), b.to_bits(), "{key}");
        }
    }
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn delta_and_calibrate_reports() {
    let out = run(&["delta", "--action", "sym-h2", "--coords", "0"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["regularity"]["regular"], false);
    assert_eq!(v["delta_closed"].as_f64(), Some(0.0));

    let out = run(&["calibrate", "--action", "sym-s2", "--order", "32"]);
    let v = json(&out);
    let c = v["calibration"]["c"].as_f64().unwrap();
    assert!((c - 2.0 * std::f64::consts::PI).abs() < 1e-10, "{c}");
}
