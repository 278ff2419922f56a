//! End-to-end tests of the `quantcat` binary: exit-code contract, report
//! determinism, and file emission.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_quantcat")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Drop the only line that legitimately varies between identical runs.
fn strip_timestamp(stdout: &[u8]) -> String {
    String::from_utf8_lossy(stdout)
        .lines()
        .filter(|l| !l.contains("generated_at_unix"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn props_passes_and_emits_deterministic_json() {
    let a = run(&["props", "--format", "json"]);
    let b = run(&["props", "--format", "json"]);
    assert_eq!(exit_code(&a), 0, "stderr: {}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(exit_code(&b), 0);
    assert_eq!(strip_timestamp(&a.stdout), strip_timestamp(&b.stdout));

    let report: serde_json::Value = serde_json::from_slice(&a.stdout).expect("valid json");
    assert_eq!(report["pass"], serde_json::json!(true));
    assert_eq!(report["results"].as_array().map(Vec::len), Some(11));
}

#[test]
fn props_is_deterministic_across_thread_counts() {
    let a = run(&["props", "--format", "json"]);
    let b = Command::new(bin())
        .args(["props", "--format", "json"])
        .env("QUANTCAT_THREADS", "1")
        .output()
        .expect("binary runs");
    assert_eq!(exit_code(&b), 0);
    assert_eq!(strip_timestamp(&a.stdout), strip_timestamp(&b.stdout));
}

#[test]
fn rejects_bad_thread_count_as_usage() {
    let out = Command::new(bin())
        .args(["props"])
        .env("QUANTCAT_THREADS", "zero")
        .output()
        .expect("binary runs");
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn check_accepts_every_shipped_fixture() {
    for name in [
        "table-closure.json",
        "discrete-pair.json",
        "mr-pointwise.json",
        "dq-pointwise.json",
        "pq-fragment.json",
    ] {
        let path = fixture(name);
        let out = run(&["check", path.to_str().unwrap()]);
        assert_eq!(
            exit_code(&out),
            0,
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn check_flags_invalid_content_with_exit_one() {
    let dir = tempfile::tempdir().expect("tempdir");

    // Malformed JSON: readable file, unusable content.
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    let out = run(&["check", broken.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);

    // Well-formed JSON that is not a category file.
    let wrong = dir.path().join("wrong.json");
    std::fs::write(&wrong, "{\"surprise\": true}\n").unwrap();
    let out = run(&["check", wrong.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], serde_json::json!(false));
    assert!(!report["results"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn missing_file_is_a_usage_error() {
    for cmd in [
        vec!["check", "/definitely/missing.json"],
        vec!["limit", "/definitely/missing.json"],
        vec!["equiv", "/definitely/missing.json", "/also/missing.json"],
    ] {
        let out = run(&cmd);
        assert_eq!(exit_code(&out), 2, "command {cmd:?}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(exit_code(&run(&["bogus-subcommand"])), 2);
    assert_eq!(exit_code(&run(&["verify", "prequant", "--dmax", "40"])), 2);
    assert_eq!(exit_code(&run(&["verify", "envelope", "--dmax", "9"])), 2);
    assert_eq!(exit_code(&run(&["verify", "matreg", "--kmin", "1"])), 2);
    assert_eq!(
        exit_code(&run(&["verify", "nctorus", "--qlist", "3,4"])),
        2
    );
    assert_eq!(exit_code(&run(&["verify", "nctorus", "--qlist", "9..3"])), 2);
}

#[test]
fn limit_reports_apexes_and_exit_codes() {
    let pq = fixture("pq-fragment.json");
    let out = run(&["limit", pq.to_str().unwrap(), "--format", "json"]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let apexes: Vec<&str> = report["results"]["apexes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(apexes.contains(&"mult-ops"), "apexes: {apexes:?}");

    let discrete = fixture("discrete-pair.json");
    let out = run(&["limit", discrete.to_str().unwrap(), "--format", "json"]);
    assert_eq!(exit_code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["results"]["apexes"].as_array().unwrap().is_empty());
}

#[test]
fn equiv_verdicts_drive_exit_codes() {
    let a = fixture("mr-pointwise.json");
    let b = fixture("dq-pointwise.json");
    let out = run(&["equiv", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let c = fixture("table-closure.json");
    let d = fixture("discrete-pair.json");
    let out = run(&["equiv", c.to_str().unwrap(), d.to_str().unwrap(), "--format", "json"]);
    assert_eq!(exit_code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["results"]["verdict"], serde_json::json!("NotEquivalent"));
}

#[test]
fn out_directory_receives_all_formats() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = fixture("table-closure.json");
    let out = run(&[
        "check",
        path.to_str().unwrap(),
        "--format",
        "json,csv,md",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(out.stdout.is_empty(), "reports go to files, not stdout");
    for name in ["check.json", "check.csv", "check.md"] {
        let p = dir.path().join(name);
        assert!(p.is_file(), "missing {name}");
        assert!(std::fs::metadata(&p).unwrap().len() > 0);
    }
}

#[test]
fn verify_prequant_small_degree_passes_quickly() {
    let out = run(&["verify", "prequant", "--dmax", "2", "--format", "json"]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], serde_json::json!(true));
    assert_eq!(report["config"]["dmax"], serde_json::json!(2));
}
