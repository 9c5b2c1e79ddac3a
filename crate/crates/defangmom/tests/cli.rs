//! End-to-end tests of the command-line binary: exit codes, text output,
//! JSON schema and byte-stable round trips.

use std::process::{Command, Output};

fn defangmom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_defangmom"))
        .args(args)
        .env_remove("DEFANGMOM_FLOAT_TOL")
        .output()
        .expect("failed to spawn binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is not utf-8")
}

#[test]
fn cg_text_and_json_agree() {
    let text = defangmom(&["cg", "1", "1", "1", "-1", "1", "0"]);
    assert!(text.status.success());
    let shown = stdout(&text);
    assert!(shown.contains("1/2*sqrt(2)"), "unexpected text: {shown}");

    let json = defangmom(&["cg", "1", "1", "1", "-1", "1", "0", "--format", "json"]);
    assert!(json.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["kind"], "cg");
    let float = doc["value"]["float"].as_f64().unwrap();
    assert!((float - 0.5_f64.sqrt()).abs() < 1e-15);
    assert_eq!(doc["value"]["exact"], "1/2*sqrt(2)");
}

#[test]
fn cg_accepts_half_integer_and_negative_projections() {
    let out = defangmom(&["cg", "1/2", "-1/2", "1/2", "1/2", "1", "0"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("1/2*sqrt(2)"));
}

#[test]
fn racah_reports_both_normalizations() {
    let out = defangmom(&["racah", "1", "1", "1", "1", "1", "1"]);
    assert!(out.status.success());
    let shown = stdout(&out);
    assert!(shown.contains("W(1111;11)") || shown.contains("W(1111"), "{shown}");
    assert!(shown.contains("\nU("), "{shown}");
}

#[test]
fn rep_json_round_trip_is_byte_identical() {
    let out = defangmom(&[
        "rep", "--algebra", "so4", "--label", "2,1", "--verify", "--format", "json",
    ]);
    assert!(out.status.success(), "stderr: {:?}", String::from_utf8_lossy(&out.stderr));
    let raw = stdout(&out);
    let doc: serde_json::Value = serde_json::from_str(&raw).unwrap();
    let re = serde_json::to_string_pretty(&doc).unwrap() + "\n";
    assert_eq!(raw, re, "JSON output must reserialize byte-identically");
    assert_eq!(doc["residuals"]["interior_only"], false);
    assert!(doc["residuals"]["max"].as_f64().unwrap() < 1e-10);
    let closed = doc["casimir"]["closed_form"]["c1d"].as_f64().unwrap();
    let spectral = doc["casimir"]["spectral"]["c1d"].as_f64().unwrap();
    assert!((closed - spectral).abs() < 1e-9);
}

#[test]
fn rep_rejects_wrong_base_coefficient_as_usage_error() {
    let out = defangmom(&[
        "rep", "--algebra", "so4", "--label", "2,1", "--params", "-1,1/10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rep_nonunitary_parameters_fail_with_exit_one() {
    // a1 = -1 destroys positivity of the lower reduced matrix elements
    let out = defangmom(&[
        "rep", "--algebra", "so4", "--label", "3,1", "--params", "1,-1", "--verify",
    ]);
    assert_eq!(out.status.code(), Some(1), "stderr: {:?}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn rep_imaginary_branch_respects_unitarity_bound() {
    let ok = defangmom(&["rep", "--algebra", "so31", "--label", "0,i0.9", "--verify"]);
    assert!(ok.status.success(), "stderr: {:?}", String::from_utf8_lossy(&ok.stderr));
    let bad = defangmom(&["rep", "--algebra", "so31", "--label", "0,i2", "--verify"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn float_tolerance_is_overridable() {
    let out = Command::new(env!("CARGO_BIN_EXE_defangmom"))
        .args(["rep", "--algebra", "so4", "--label", "3,1", "--params", "1,1/10", "--verify"])
        .env("DEFANGMOM_FLOAT_TOL", "1e-18")
        .output()
        .expect("failed to spawn binary");
    assert_eq!(out.status.code(), Some(1), "a 1e-18 tolerance must reject float residuals");
}

#[test]
fn casimir_reports_closed_form_discrepancy() {
    let out = defangmom(&[
        "casimir", "--params", "1,1,2,3,5", "--compare-paper",
    ]);
    assert!(out.status.success());
    let shown = stdout(&out);
    assert!(shown.contains("b_3 disagrees"), "{shown}");
    assert!(shown.contains("pass"), "{shown}");
}

#[test]
fn associativity_and_quadrupole_pass() {
    let assoc = defangmom(&["associativity", "--order", "3"]);
    assert!(assoc.status.success());
    assert!(stdout(&assoc).contains("pass"));

    let quad = defangmom(&["quadrupole"]);
    assert!(quad.status.success());
    assert!(stdout(&quad).contains("non-associative at first order"));
}

#[test]
fn usage_errors_exit_with_two() {
    let bad_alg = defangmom(&["rep", "--algebra", "su5", "--label", "1,0"]);
    assert_eq!(bad_alg.status.code(), Some(2));
    let bad_num = defangmom(&["cg", "x", "0", "1", "0", "1", "0"]);
    assert_eq!(bad_num.status.code(), Some(2));
}
