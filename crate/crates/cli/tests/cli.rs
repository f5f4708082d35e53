use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const TERNARY: &str = r#"{
  "states": 3,
  "actions": ["a1", "a2", "a3"],
  "prior": ["1/3", "1/3", "1/3"],
  "sender_utility": [["10", "0", "0"], ["10", "2", "0"], ["0", "2", "1"]],
  "receiver_utility": [["4", "0", "0"], ["2", "3", "1"], ["0", "1", "3"]],
  "constraints": { "lb": ["0", "0", "0"], "ub": ["1/2", "1", "1"] }
}"#;

const ALWAYS_A1: &str = r#"{
  "states": 2, "actions": 2, "prior": ["1/2", "1/2"],
  "sender_utility": [[1, 0], [1, 0]],
  "receiver_utility": [[1, 0], [1, 0]],
  "constraints": { "lb": ["1/2", "0"], "ub": ["1/2", "1"] }
}"#;

const MATCHING: &str = r#"{
  "states": 2, "actions": 2, "prior": ["1/2", "1/2"],
  "sender_utility": [[2, 0], [1, 0]],
  "receiver_utility": [[1, 0], [0, 1]],
  "constraints": { "lb": ["0", "0"], "ub": ["3/4", "1"] }
}"#;

fn fixture(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qpersuade-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpersuade"))
        .args(args)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (v, out.status.code().unwrap())
}

#[test]
fn repro_sec31_exact_values() {
    let (v, code) = json(&["repro", "sec31"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["values"]["receiver_eu_unconstrained"], "301/400");
    assert_eq!(v["values"]["receiver_eu_constrained"], "601/800");
    assert_eq!(v["values"]["gap"], "1/800");
}

#[test]
fn repro_with_custom_eps() {
    let (v, code) = json(&["repro", "sec31", "--eps", "1/20"]);
    assert_eq!(code, 0);
    assert_eq!(v["values"]["gap"], "1/160");
}

#[test]
fn solve_expost_on_ternary() {
    let f = fixture("ternary.json", TERNARY);
    let (v, code) = json(&["solve", f.to_str().unwrap(), "--method", "expost"]);
    assert_eq!(code, 0);
    assert_eq!(v["receiver_eu"], "17/6");
    assert_eq!(v["sender_eu"], "35/6");
    assert_eq!(v["method"], "expost-lp");
}

#[test]
fn solve_binary_and_grid_agree() {
    let f = fixture("matching.json", MATCHING);
    let (exact, code) = json(&["solve", f.to_str().unwrap(), "--method", "binary"]);
    assert_eq!(code, 0);
    assert_eq!(exact["receiver_eu"], "3/4");
    let (grid, code) = json(&[
        "solve",
        f.to_str().unwrap(),
        "--method",
        "grid",
        "--grid",
        "40",
        "--band",
        "0",
    ]);
    assert_eq!(code, 0);
    assert_eq!(grid["grid"], 40);
    assert_eq!(grid["receiver_eu"], "3/4");
}

#[test]
fn infeasible_quota_exit_code() {
    let f = fixture("always.json", ALWAYS_A1);
    let out = run(&["solve", f.to_str().unwrap(), "--method", "expost"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible"));
}

#[test]
fn invalid_input_exit_code() {
    let f = fixture("broken.json", "{ \"states\": 2 ");
    assert_eq!(run(&["check", f.to_str().unwrap()]).status.code(), Some(1));
    let t = fixture("ternary-b.json", TERNARY);
    assert_eq!(
        run(&["solve", t.to_str().unwrap(), "--method", "binary"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn check_reports_structure() {
    let f = fixture("ternary-c.json", TERNARY);
    let (v, code) = json(&["check", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["classification"]["state_matching"], true);
    assert_eq!(v["structural"]["prop3_sender_monotone"], false);
    assert_eq!(v["constraints"]["feasible"], true);
}

#[test]
fn fuzz_exit_codes() {
    let (v, code) = json(&[
        "fuzz",
        "--mode",
        "theorem2-binary",
        "--trials",
        "50",
        "--seed",
        "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["violation_count"], 0);
    assert_eq!(v["checked"], 50);

    // The injected ternary example drops by 1/6; with no slack it counts.
    let (v, code) = json(&[
        "fuzz",
        "--mode",
        "prop3-ternary",
        "--trials",
        "1",
        "--no-filter",
        "--slack",
        "0",
    ]);
    assert_eq!(code, 3);
    assert_eq!(v["violations"][0]["decrease"], "1/6");
}

#[test]
fn text_and_csv_formats() {
    let out = run(&["repro", "coin"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l == "values.receiver_eu_constrained: 3/4"));
    let out = run(&["--format", "csv", "repro", "coin"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("key,value\n"));
    assert!(csv.lines().any(|l| l == "values.a1_probability,1/2"));
}
