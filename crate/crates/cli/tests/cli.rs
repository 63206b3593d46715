// Copyright 2026 qwass contributors
// SPDX-License-Identifier: Apache-2.0

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn qwass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwass")).args(args).env_remove("QOT_SEED").output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const KET0: &str = r#"{"dims":[2],"vec":[[1,0],[0,0]]}"#;
const HALF: &str = r#"{"dims":[2],"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;
const BELL: &str = r#"{"dims":[2,2],"vec":[[0.7071067811865476,0],[0,0],[0,0],[0.7071067811865476,0]]}"#;

#[test]
fn help_exits_zero() {
    let out = qwass(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("experiment"));
}

#[test]
fn pure_against_maximally_mixed_qubit() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (write(&dir, "a.json", KET0), write(&dir, "b.json", HALF));
    let v = json_of(&qwass(&["wp", "estimate", "--metric", "trace", "--p", "1", "--a", s(&a), "--b", s(&b)]));
    assert_eq!(v["lower"], 0.5);
    assert_eq!(v["upper"], 0.5);
}

#[test]
fn asym_per_site_on_bell() {
    let dir = TempDir::new().unwrap();
    let bell = write(&dir, "bell.json", BELL);
    let v = json_of(&qwass(&["norm", "asym", "--a", s(&bell), "--b", s(&bell), "--per-site"]));
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn lipschitz_of_half_z() {
    let dir = TempDir::new().unwrap();
    let op = write(&dir, "z.json", r#"{"dims":[2],"matrix":[[[0.5,0],[0,0]],[[0,0],[-0.5,0]]]}"#);
    let v = json_of(&qwass(&["lipschitz", "--op", s(&op)]));
    assert_eq!(v["value"], 1);
    assert_eq!(v["certified"], true);
}

#[test]
fn same_seed_same_bytes() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (p, seed, sdim) in [(&a, "5", "2"), (&b, "6", "3")] {
        let out = qwass(&["sample", "mixed", "--dims", "3", "--s", sdim, "--seed", seed]);
        std::fs::write(p, &out.stdout).unwrap();
    }
    let args = ["wp", "estimate", "--a", s(&a), "--b", s(&b), "--seed", "9", "--restarts", "3"];
    let first = qwass(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, qwass(&args).stdout);
    let exp = ["experiment", "low-rank", "--trials", "5", "--seed", "11"];
    assert_eq!(qwass(&exp).stdout, qwass(&exp).stdout);
}

#[test]
fn env_seed_is_a_fallback() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qwass"));
        cmd.args(["sample", "pure", "--dims", "2"]).env_remove("QOT_SEED");
        if let Some(e) = env {
            cmd.env("QOT_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("4"), None), run(None, Some("4")));
    assert_eq!(run(Some("3"), Some("4")), run(None, Some("4")));
    assert_ne!(run(Some("3"), None), run(None, Some("4")));
}

#[test]
fn invalid_state_exits_two_naming_the_invariant() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"dims":[2],"vec":[[1,0],[1,0]]}"#);
    let ok = write(&dir, "ok.json", KET0);
    let out = qwass(&["wp", "estimate", "--a", s(&bad), "--b", s(&ok)]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["invariant"], "unit_norm");
}

#[test]
fn missing_file_and_unknown_flag_fail() {
    let out = qwass(&["wp", "estimate", "--a", "/nonexistent/a.json", "--b", "/nonexistent/b.json"]);
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io");
    assert_eq!(qwass(&["sample", "pure", "--dims", "2", "--bogus"]).status.code(), Some(2));
}

#[test]
fn config_file_is_merged_and_checked() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "good.toml", "seed = 4\n[search]\nrestarts = 2\n");
    let bad = write(&dir, "bad.toml", "sede = 4\n");
    let from_file = qwass(&["sample", "pure", "--dims", "2", "--config", s(&good)]);
    assert_eq!(from_file.stdout, qwass(&["sample", "pure", "--dims", "2", "--seed", "4"]).stdout);
    assert_eq!(qwass(&["sample", "pure", "--dims", "2", "--config", s(&bad)]).status.code(), Some(2));
}

#[test]
fn plan_reduce_keeps_cost() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    std::fs::write(&a, qwass(&["sample", "mixed", "--dims", "2", "--s", "2", "--seed", "1"]).stdout).unwrap();
    std::fs::write(&b, qwass(&["sample", "mixed", "--dims", "2", "--s", "2", "--seed", "2"]).stdout).unwrap();
    let v = json_of(&qwass(&["wp", "estimate", "--a", s(&a), "--b", s(&b)]));
    let plan = write(&dir, "plan.json", &v["witness"].to_string());
    let out_plan = dir.path().join("reduced.json");
    let r = json_of(&qwass(&["plan", "reduce", "--plan", s(&plan), "--output", s(&out_plan)]));
    assert!(r["entries_after"].as_u64().unwrap() <= 8);
    assert!(r["value_after"].as_f64().unwrap() <= r["value_before"].as_f64().unwrap() + 1e-10);
    let c = json_of(&qwass(&["plan", "cost", "--plan", s(&out_plan), "--p", "inf"]));
    assert!(c["value"].as_f64().unwrap() <= 1.0);
}

#[test]
fn experiment_csv_with_summary() {
    let dir = TempDir::new().unwrap();
    let summary = dir.path().join("summary.json");
    let out = qwass(&[
        "experiment", "hypercontractivity", "--metric", "hamming:2,2", "--p1", "1", "--p2", "2", "--delta", "auto",
        "--seed", "3", "--trials", "10", "--out", "csv", "--summary", s(&summary),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("trial,m,threshold,delta,lifted,ratio,ratio_floor,status"));
    assert_eq!(text.lines().count(), 11);
    let sum: Value = serde_json::from_str(&std::fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(sum["summary"]["violations"], 0);
}

#[test]
fn metric_check_reports_metadata() {
    let v = json_of(&qwass(&["metric", "check", "--metric", "trace", "--dims", "3"]));
    assert_eq!(v["diameter"]["value"], 1);
    assert_eq!(v["validation"]["hoelder_accepted"], true);
    assert_eq!(qwass(&["metric", "check", "--metric", "trace"]).status.code(), Some(2));
}
