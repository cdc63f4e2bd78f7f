use std::process::{Command, Output};

use serde_json::Value;

fn jacobi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jacobi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn reports(out: &Output) -> Vec<Value> {
    let v: Value = serde_json::from_slice(&out.stdout).expect("json output");
    v.as_array().expect("array").clone()
}

fn strip_elapsed(mut v: Vec<Value>) -> Vec<Value> {
    for r in &mut v {
        r.as_object_mut().unwrap().remove("elapsed_ms");
    }
    v
}

#[test]
fn empty_run_prints_empty_array() {
    let out = jacobi(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "[]");
}

#[test]
fn dims_degree_one_reduced_is_three() {
    let out = jacobi(&["dims", "--space", "reduced", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = reports(&out);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["value"], "3");
    assert_eq!(r[0]["status"], "pass");
    let out = jacobi(&["verify", "dims", "--space", "chords", "--degree", "2"]);
    // 5 splittings of 4 points over two strands, 3 matchings each
    assert_eq!(reports(&out)[0]["value"], "15");
}

#[test]
fn report_fields_in_stable_order() {
    let out = jacobi(&["verify", "grt", "--element", "sigma3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let keys = [
        "\"check\"",
        "\"params\"",
        "\"status\"",
        "\"witness\"",
        "\"elapsed_ms\"",
        "\"degree_caps\"",
        "\"value\"",
    ];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).expect(k)).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(reports(&out)[0]["status"], "pass");
}

#[test]
fn deep_only_element_is_skipped_by_default() {
    let out = jacobi(&["verify", "prop11", "--max-degree", "6"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(reports(&out)[0]["status"], "skipped");
}

#[test]
fn invalid_input_exits_with_two() {
    assert_eq!(jacobi(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(
        jacobi(&["verify", "twist-j3", "--alpha", "x"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        jacobi(&["verify", "thm12", "--n", "9"]).status.code(),
        Some(2)
    );
    assert_eq!(
        jacobi(&["verify", "grt", "--element", "sigma4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        jacobi(&["verify", "prop11", "--max-degree", "7"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        jacobi(&["verify", "example21", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        jacobi(&["dims", "--space", "chords"]).status.code(),
        Some(2)
    );
}

#[test]
fn reports_are_identical_across_job_counts() {
    let args = [
        "verify",
        "example21",
        "twist-j3",
        "prop44",
        "dims",
        "--alpha",
        "1/3",
    ];
    let one = jacobi(&[&args[..], &["--jobs", "1"]].concat());
    let four = jacobi(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    let (a, b) = (strip_elapsed(reports(&one)), strip_elapsed(reports(&four)));
    assert_eq!(a, b);
    let names: Vec<&str> = a.iter().map(|r| r["check"].as_str().unwrap()).collect();
    assert_eq!(names, ["dims", "example21", "prop44", "twist-j3"]);
}

#[test]
fn twist_with_explicit_rationals_passes() {
    let out = jacobi(&[
        "verify",
        "twist-j3",
        "--alpha",
        "-2/5",
        "--lambda1",
        "3",
        "--lambda2",
        "sym",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &reports(&out)[0];
    assert_eq!(r["params"]["alpha"], "-2/5");
    assert_eq!(r["params"]["lambda1"], "3");
}

#[test]
fn adversarial_prop11_at_degree_eight_fails_with_witness() {
    let out = jacobi(&["verify", "prop11", "--max-degree", "8"]);
    assert_eq!(out.status.code(), Some(1));
    let r = &reports(&out)[0];
    assert_eq!(r["status"], "fail");
    let w = r["witness"].as_str().expect("witness present");
    assert!(w.starts_with('(') && w.len() > 10);
}

#[test]
fn text_format_is_a_table() {
    let out = jacobi(&["verify", "example21", "--format", "text"]);
    let s = String::from_utf8_lossy(&out.stdout);
    assert!(s.starts_with("example21"));
    assert!(s.contains("pass"));
}
