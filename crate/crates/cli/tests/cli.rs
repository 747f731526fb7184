//! End-to-end tests for the command-line interface: exit codes,
//! output determinism, and the error taxonomy.

use mhc_core::matrix::Matrix;
use mhc_core::monomod::{ExponentKey, Filtration, GradedPiece, MonodromicModule};
use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn mhc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("mhc-cli-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn validate_accepts_every_corpus_file() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = mhc(&["validate", path.to_str().unwrap()]);
        assert!(out.status.success(), "validate failed on {path:?}");
    }
}

#[test]
fn parse_errors_exit_with_code_two() {
    let out = mhc(&["validate", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(2));
    let bad = temp_file("garbage.json", "not json at all");
    let out = mhc(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validation_failures_exit_with_code_one() {
    let mut m = MonodromicModule::new(1);
    m.insert_piece(
        ExponentKey::from_i64(&[0]),
        GradedPiece::new(2, vec![Matrix::identity(2)], Filtration::full_at(2, 0)),
    );
    let path = temp_file("broken.json", &m.to_json());
    let out = mhc(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("nilpotent"), "error not located: {stderr}");
}

#[test]
fn irrational_eigenvalue_exits_with_code_three() {
    let path = temp_file("euler.json", r#"{"euler": [["0", "2"], ["1", "0"]]}"#);
    let out = mhc(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let rational = temp_file("euler-ok.json", r#"{"euler": [["1", "0"], ["0", "-1/2"]]}"#);
    let out = mhc(&["validate", rational.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn jump_table_commands_succeed() {
    let kummer = corpus("kummer_1_2.json");
    let out = mhc(&[
        "irr-hodge",
        kummer.to_str().unwrap(),
        "--alpha",
        "1/2",
        "--range",
        "-3..3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(-1/2)"), "missing dual exponent: {text}");

    let jordan = corpus("jordan2.json");
    for args in [
        vec!["oracle-check", jordan.to_str().unwrap()],
        vec!["oracle-check", jordan.to_str().unwrap(), "--infinity"],
        vec!["hodge", jordan.to_str().unwrap(), "--route", "formula"],
        vec!["infinity", jordan.to_str().unwrap(), "--check", "all"],
        vec!["xi", jordan.to_str().unwrap()],
        vec!["reconstruct", jordan.to_str().unwrap()],
    ] {
        let out = mhc(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?} failed");
    }
}

#[test]
fn fourier_round_trips_through_the_module_format() {
    let delta = corpus("delta.json");
    let out = mhc(&["fourier", delta.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let m = MonodromicModule::from_json(&text).expect("output is a valid module");
    assert_eq!(m.to_json() + "\n", text);
}

#[test]
fn localize_rejects_a_bad_axis() {
    let delta = corpus("delta.json");
    let out = mhc(&["localize", delta.to_str().unwrap(), "--mode", "star", "--axis", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_output_is_deterministic() {
    let nc2 = corpus("nc2.json");
    let a = mhc(&["report", nc2.to_str().unwrap(), "--format", "json"]);
    let b = mhc(&["report", nc2.to_str().unwrap(), "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = mhc(&["report", nc2.to_str().unwrap()]);
    assert_eq!(text.status.code(), Some(0));
}
