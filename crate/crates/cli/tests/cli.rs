use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn densparam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_densparam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_isotropic_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        &dir,
        "iso.json",
        r#"{"schema_version": "1", "kind": "family", "payload": {"family": "isotropic", "p": 0.2}}"#,
    );
    let matrix = dir.path().join("rho.json");
    let out = densparam(&["generate", s(&input), "-o", s(&matrix)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&matrix).unwrap()).unwrap();
    assert_eq!(doc["dims"], serde_json::json!([2, 2]));
    for (i, want) in [0.3, 0.2, 0.2, 0.3].into_iter().enumerate() {
        let re = doc["matrix"][i][i][0].as_f64().unwrap();
        assert!((re - want).abs() < 1e-15);
    }

    let out = densparam(&["analyze", s(&matrix)]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["valid_state"], true);
    assert_eq!(report["ppt"]["is_ppt"], true);
    let min_pt = report["ppt"]["min_pt_eig"].as_f64().unwrap();
    assert!((min_pt - 0.1).abs() < 1e-12);
}

#[test]
fn matrix_text_output_is_readable_by_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        &dir,
        "p.json",
        r#"{"schema_version": "1", "kind": "family", "payload": {"family": "pure_P", "alpha": 0.7853981633974483}}"#,
    );
    let out = densparam(&["generate", s(&input), "--format", "matrix_text"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    let matrix = write(&dir, "p.txt", &text);

    let out = densparam(&["analyze", s(&matrix), "--n", "2", "--m", "2"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["rank"], 1);
    assert_eq!(report["ppt"]["verdict"], "npt");
}

#[test]
fn lambdas_not_summing_to_one_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        &dir,
        "bad.json",
        r#"{"schema_version": "1", "kind": "single", "payload": {"lambdas": [0.5, 0.4]}}"#,
    );
    let out = densparam(&["generate", s(&input)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambdas"));
}

#[test]
fn malformed_and_missing_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(&dir, "broken.json", "{\"schema_version\": \"1\", ");
    assert_eq!(code(&densparam(&["generate", s(&input)])), 2);
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&densparam(&["generate", s(&missing)])), 2);
    assert_eq!(code(&densparam(&["reproduce", "no_such_example"])), 2);
    assert_eq!(code(&densparam(&["validate", "--trials", "0"])), 2);
}

#[test]
fn non_psd_family_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        &dir,
        "alpha.json",
        r#"{"schema_version": "1", "kind": "family", "payload": {"family": "isotropic_alpha", "p": 1.5, "alpha": 0.3}}"#,
    );
    assert_eq!(code(&densparam(&["generate", s(&input)])), 3);
}

#[test]
fn analyze_non_state_exit_4_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write(&dir, "m.json", "[[[0.7, 0], [0, 0]], [[0, 0], [0.5, 0]]]");
    let out = densparam(&["analyze", s(&matrix), "--n", "2", "--m", "1"]);
    assert_eq!(code(&out), 4);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["valid_state"], false);
    assert!(!report["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn every_worked_example_reproduces() {
    for id in [
        "pure_P",
        "isotropic_threshold",
        "circulant_pi12",
        "bell_boundary",
        "toeplitz_demo",
        "hankel_demo",
        "class3_projector",
    ] {
        let out = densparam(&["reproduce", id, "--seed", "3"]);
        assert_eq!(
            code(&out),
            0,
            "{id}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn validate_passes_and_is_seeded() {
    let a = densparam(&["validate", "--seed", "9", "--trials", "10"]);
    let b = densparam(&["validate", "--seed", "9", "--trials", "10"]);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stdout)
        .lines()
        .all(|l| !l.starts_with("FAIL")));
}

#[test]
fn one_cell_sweep() {
    let out = densparam(&["sweep", "--family", "isotropic", "--axis", "p=0.5:0.5:1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("p,min_pt_eig"));
    assert!(lines[1].contains("-1.25"));
}

#[test]
fn sweep_rejects_unknown_axis() {
    let out = densparam(&["sweep", "--family", "isotropic", "--axis", "q=0:1:3"]);
    assert_eq!(code(&out), 2);
}
