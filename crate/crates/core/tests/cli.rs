use std::process::{Command, Output};

use nlpot::classify::{Verdict, VerdictState};
use serde_json::Value;

const LOG_MODEL: &str = r#"{"kind":"log","n":3,"s":3,"beta":1}"#;
const NEWTONIAN: &str = r#"{"kind":"lebesgue","n":3}"#;

fn nlpot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlpot")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn verify_examples_exit_codes() {
    assert_eq!(nlpot(&["verify-examples"]).status.code(), Some(0));
    assert_eq!(nlpot(&["verify-examples", "--only", "newtonian"]).status.code(), Some(0));
    let broken = nlpot(&["verify-examples", "--only", "ex-log-2", "--inject-beta", "2.5"]);
    assert_eq!(broken.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&broken)).unwrap();
    assert_eq!(report["pass"], Value::Bool(false));
    assert_eq!(report["examples"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_and_spec_errors_exit_2() {
    assert_eq!(nlpot(&["capacity", "--p", "2"]).status.code(), Some(2));
    assert_eq!(nlpot(&["no-such-command"]).status.code(), Some(2));
    let bad = nlpot(&["exponents", "--model", r#"{"kind":"nope"}"#]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("nope"));
    let out_of_domain = nlpot(&["exponents", "--model", r#"{"kind":"power","n":3,"alpha":5}"#]);
    assert_eq!(out_of_domain.status.code(), Some(2));
    assert_eq!(nlpot(&["verify-examples", "--only", "nope"]).status.code(), Some(2));
}

#[test]
fn classify_json_round_trips() {
    let out = nlpot(&["classify", "--model", LOG_MODEL, "--p", "2", "--question", "green-in-ltau", "--tau", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let v: Verdict = serde_json::from_str(&text).unwrap();
    assert_eq!(v.state, VerdictState::BorderlineIn);
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
}

#[test]
fn capacity_matches_closed_form_and_reads_model_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    std::fs::write(&path, NEWTONIAN).unwrap();
    let out = nlpot(&[
        "capacity",
        "--model",
        path.to_str().unwrap(),
        "--p",
        "2",
        "--r",
        "1",
        "--R",
        "2",
        "--method",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let value = rows[0]["value"].as_f64().unwrap();
    assert!((value - 8.0 * std::f64::consts::PI).abs() < 1e-9 * value);
}

#[test]
fn out_flag_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let out = nlpot(&[
        "green-profile",
        "--model",
        NEWTONIAN,
        "--p",
        "2",
        "--points",
        "5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 6, "{csv}");
}

#[test]
fn reports_are_deterministic() {
    let args = ["--seed", "7", "verify-examples", "--only", "newtonian"];
    let a = nlpot(&args);
    let b = nlpot(&args);
    assert_eq!(a.stdout, b.stdout);
    let args = ["green-norms", "--model", LOG_MODEL, "--p", "2", "--tau", "3", "--t", "1.5"];
    assert_eq!(nlpot(&args).stdout, nlpot(&args).stdout);
}
