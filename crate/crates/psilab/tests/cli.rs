use std::process::{Command, Output};

use serde_json::Value;

fn psilab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psilab")).args(args).output().expect("run psilab")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

#[test]
fn eval_at_two_passes_with_all_methods() {
    let out = psilab(&["eval", "--z", "2+0i", "--method", "all"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("claim,z,method,re,im,abs_err,bound,flags,ok\n"));
    assert!(text.contains("1.64493406684822"), "{text}");
    assert!(!text.contains('\r'));
}

#[test]
fn eval_at_pole_is_a_domain_error() {
    let out = psilab(&["eval", "--z", "1+1e-12i"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn eval_near_first_zero_is_small() {
    let out = psilab(&["eval", "--z", "0.5+14.134725i", "--method", "em"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let re: f64 = row[3].parse().unwrap();
    let im: f64 = row[4].parse().unwrap();
    assert!(re.hypot(im) < 1e-5, "{text}");
}

#[test]
fn feq_grid_passes() {
    let out = psilab(&["feq", "--z", "2..4:3", "--x", "1..5:5", "--method", "series"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 1 + 15);
}

#[test]
fn feq_rejects_nonpositive_x() {
    assert_eq!(code(&psilab(&["feq", "--z", "2", "--x", "0..2:3"])), 2);
}

#[test]
fn norm_scan_verdicts() {
    let out = psilab(&["norm-scan", "--sigma", "0.6..2.6:3", "--alpha", "0"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let verdicts: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(verdicts, ["Divergent", "Convergent", "Convergent"], "{text}");
}

#[test]
fn operators_wrong_sign_is_a_claim_failure() {
    let ok = psilab(&["operators", "--experiment", "intertwine", "--z", "0.75+5i", "--h", "0.02"]);
    assert_eq!(code(&ok), 0);
    let bad = psilab(&["operators", "--experiment", "intertwine", "--z", "0.75+5i", "--h", "0.02", "--sign", "paper"]);
    assert_eq!(code(&bad), 1);
}

#[test]
fn report_has_the_expected_fields() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let out = psilab(&[
        "pole",
        "--report",
        report.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let json: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let keys: Vec<&str> = json.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["command", "parameters", "rows", "pass", "tolerance_used", "wall_time_ms"]);
    assert_eq!(json["command"], "pole");
    assert_eq!(json["pass"], true);
    let rows = json["rows"].as_array().unwrap();
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.len() + 1, csv_text.lines().count());
}

#[test]
fn output_is_deterministic() {
    let args = ["boundary"];
    let a = psilab(&args);
    let b = psilab(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn malformed_input_never_panics() {
    let cases: &[&[&str]] = &[
        &[],
        &["bogus"],
        &["eval"],
        &["eval", "--z", "abc"],
        &["eval", "--z", "2", "--x", "nan"],
        &["eval", "--z", "2", "--x", "-5", "--method", "series"],
        &["eval", "--z", "2", "--tol", "-1"],
        &["eval", "--z", "2", "--tol", "0"],
        &["eval", "--z", "-3+2i", "--method", "em"],
        &["eval", "--z", "1e300", "--x", "1e300"],
        &["feq", "--z", "2..1:3", "--x", "1"],
        &["feq", "--z", "1..2:100000", "--x", "1"],
        &["feq", "--z", "2", "--x", "1", "--method", "all"],
        &["boundary", "--z", "1"],
        &["pole", "--eps", "1"],
        &["pole", "--x", "-1"],
        &["norm-scan", "--sigma", "0.5", "--alpha", "9"],
        &["operators", "--experiment", "shift", "--h", "0.03"],
        &["operators", "--experiment", "shift", "--trials", "100000000000"],
        &["operators", "--experiment", "momentum", "--h", "0.001"],
        &["operators", "--experiment", "momentum", "--h", "-1"],
        &["operators", "--experiment", "dilation", "--z", "-1"],
        &["operators", "--experiment", "defect", "--x-max", "1e9"],
        &["suite", "--profile", "slow"],
    ];
    for args in cases {
        let out = psilab(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&psilab(&["--help"])), 0);
    assert_eq!(code(&psilab(&["eval", "--help"])), 0);
}
