use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use ybe_core::constructions::x1;
use ybe_core::io::qcycle_to_text;

fn ybe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ybe")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn validates_x1_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "x1.txt", &qcycle_to_text(&x1()));
    let out = ybe(&["validate", &path]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(r["valid"], true);
    assert_eq!(r["cycle_set"], true);
    assert_eq!(r["indecomposable"], true);
    assert_eq!(r["yang_baxter"], true);
}

#[test]
fn corrupted_row_reports_violation() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = qcycle_to_text(&x1());
    let first = text.lines().next().unwrap().to_owned();
    text = text.replacen(&first, "sigma_1 = (1,2)", 1);
    let path = write(dir.path(), "bad.txt", &text);
    let out = ybe(&["validate", &path]);
    assert_eq!(out.status.code(), Some(1));
    let r = &json(&out)["result"];
    assert_eq!(r["valid"], false);
    assert!(!r["violation"].as_str().unwrap().is_empty());
}

#[test]
fn z9_brace_file_is_valid() {
    let n = 9;
    let add: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let mul: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b + 3 * a * b) % n).collect()).collect();
    let body = serde_json::json!({ "n": n, "add": add, "mul": mul }).to_string();
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "z9.json", &body);
    let out = ybe(&["validate", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["kind"], "brace");
}

#[test]
fn parse_errors_exit_3_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "junk.txt", "sigma_1 = (1,2\n");
    let out = ybe(&["validate", &path]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn unknown_builtin_exits_3() {
    assert_eq!(ybe(&["analyze", "builtin:X9"]).status.code(), Some(3));
}

#[test]
fn analyze_named_examples() {
    let r = json(&ybe(&["analyze", "builtin:X3"]));
    assert_eq!(r["result"]["one_generator"], true);
    assert!(r["result"]["generators"].as_array().unwrap().contains(&Value::from(1)));
    let r = json(&ybe(&["analyze", "builtin:rump(2)"]));
    assert_eq!(r["result"]["indecomposable"], true);
    assert_eq!(r["result"]["irretractable"], true);
    assert_eq!(r["result"]["one_generator"], false);
    let r = json(&ybe(&["analyze", "builtin:zp_shift(5)"]));
    assert_eq!(r["result"]["irreducible"], true);
}

#[test]
fn reports_carry_version_and_conventions() {
    let r = json(&ybe(&["analyze", "builtin:X1"]));
    assert_eq!(r["tool"], "ybe");
    assert_eq!(r["version"], ybe_core::VERSION);
    assert_eq!(r["conventions"], ybe_core::CONVENTIONS);
}

#[test]
fn reproduce_braces_passes() {
    let out = ybe(&["--format", "text", "reproduce", "braces"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.contains("perm brace of X2: size") && l.ends_with("PASS")), "{text}");
}

#[test]
fn reproduce_census_under_tight_budget_skips() {
    let out = ybe(&["reproduce", "census", "--max-seconds", "0.000001"]);
    assert_eq!(out.status.code(), Some(2));
    let rows = json(&out)["result"].as_array().unwrap().clone();
    assert!(rows.iter().any(|r| r["status"] == "SKIPPED" && r["item"].as_str().unwrap().starts_with("n=9")));
}

#[test]
fn closure_seed_is_one_based() {
    let r = json(&ybe(&["closure", "builtin:X3", "--seed", "1"]));
    let s = r.to_string();
    assert!(s.contains("[1,2,3,4,5,6,7,8]"), "{s}");
}

#[test]
fn permbrace_of_x2_has_32_elements() {
    let r = json(&ybe(&["permbrace", "builtin:X2"]));
    assert_eq!(r["result"]["brace"]["n"], 32);
    assert_eq!(r["result"]["elements"].as_array().unwrap().len(), 32);
}
