//! End-to-end tests of the binary: exit codes, file artifacts, formats.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn deglab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deglab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn scan_writes_csv_with_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "families": ["power:d=1"],
            "regime": "op53",
            "delta_grid": [1.0],
            "N": 1024,
            "tol": 1e-4,
            "output_path": "out.csv",
            "format": "csv"
        }"#,
    );
    let out = deglab(&["scan", "--config", &config], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "family,params,regime,param_value,degree,energy_value,energy_error,ratio,notes"
    );
    let row = lines.next().unwrap();
    assert!(
        row.starts_with("power,d=1,op53,1.00000000000e0,1,"),
        "{row}"
    );
    // 1/(δ·I_δ(id)) = 1/(2π√3) ≈ 9.1889e-2 at δ = 1.
    let ratio: f64 = row.split(',').nth(7).unwrap().parse().unwrap();
    let expected = 1.0 / (2.0 * std::f64::consts::PI * 3.0_f64.sqrt());
    assert!((ratio - expected).abs() / expected < 0.01, "{row}");
    assert!(lines.next().is_none());
}

#[test]
fn scan_rejects_delta_beyond_sqrt3() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{"families": ["power:d=1"], "regime": "op53", "delta_grid": [2.0], "N": 1024}"#,
    );
    let out = deglab(&["scan", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("delta_grid"), "{stderr}");
}

#[test]
fn scan_rejects_p_equal_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{"families": ["power:d=1"], "regime": "op51", "p_grid": [1.0], "N": 1024}"#,
    );
    let out = deglab(&["scan", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p_grid"));
}

#[test]
fn scan_rejects_unknown_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{"families": [], "regime": "hhalf", "N": 256, "grids": []}"#,
    );
    let out = deglab(&["scan", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_reports_missing_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = deglab(&["scan", "--config", "absent.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_flags_row_errors_with_numeric_exit() {
    // Blaschke parameter far too concentrated for N = 64; the row error is
    // recorded, the report still written, and the exit code is nonzero.
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "families": ["blaschke:a_modulus=0.99,a_angle=0"],
            "regime": "op53",
            "delta_grid": [1.0],
            "N": 64,
            "output_path": "out.csv"
        }"#,
    );
    let out = deglab(&["scan", "--config", &config], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert!(csv.contains("error:"), "{csv}");
}

#[test]
fn report_reformats_json_scan_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "families": ["power:d=2"],
            "regime": "hhalf",
            "N": 512,
            "output_path": "out.json",
            "format": "json"
        }"#,
    );
    let out = deglab(&["scan", "--config", &config], dir.path());
    assert!(out.status.success());
    let json = fs::read_to_string(dir.path().join("out.json")).unwrap();

    let reformat = deglab(
        &["report", "--in", "out.json", "--format", "json"],
        dir.path(),
    );
    assert!(reformat.status.success());
    assert_eq!(String::from_utf8_lossy(&reformat.stdout), json);

    let as_csv = deglab(
        &["report", "--in", "out.json", "--format", "csv"],
        dir.path(),
    );
    assert!(as_csv.status.success());
    let csv = String::from_utf8_lossy(&as_csv.stdout);
    assert!(csv.starts_with("family,params,regime,"));
    assert_eq!(csv.lines().count(), 2);
    // hhalf ratio of z² is 1/(4π²).
    assert!(csv.contains("2.53"), "{csv}");
}

#[test]
fn scan_lemmas_regime_reports_comparison_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "config.json",
        r#"{
            "families": ["power:d=1"],
            "regime": "lemmas",
            "delta_grid": [0.5],
            "N": 512,
            "tol": 2e-3,
            "output_path": "out.csv"
        }"#,
    );
    let out = deglab(&["scan", "--config", &config], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert!(csv.contains("energy_comparison ok"), "{csv}");
    assert!(csv.contains("lemmas"), "{csv}");
}

#[test]
fn report_rejects_non_report_input() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("junk.json"), "{\"rows\": 3}").unwrap();
    let out = deglab(
        &["report", "--in", "junk.json", "--format", "csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_lemmas_fast_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = deglab(&["check-lemmas", "--suite", "fast"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("check separation"));
    assert!(stdout.contains("check weighted-kernel"));
    assert!(stdout.contains("check chord-bound"));
    assert!(stdout.contains("check energy-comparison"));
    assert!(stdout.contains("all checks passed"));
}

#[test]
fn oracle_selftest_passes_at_moderate_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = deglab(&["oracle-selftest", "--n", "512"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("oracle-selftest: PASS"));
}
