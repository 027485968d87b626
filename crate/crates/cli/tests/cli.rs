//! End-to-end tests of the `verify` binary: exit codes, report schema,
//! config handling, and byte-identical reports across runs.

use std::path::Path;
use std::process::{Command, Output};

fn verify() -> Command {
    Command::new(env!("CARGO_BIN_EXE_verify"))
}

fn run(args: &[&str]) -> Output {
    verify().args(args).output().expect("verify runs")
}

#[test]
fn list_names_all_checks() {
    let out = run(&["--list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 22);
    assert!(text.contains("lemma-char"));
    assert!(text.contains("oldcrap-endomorphism"));
}

#[test]
fn single_check_exit_zero_and_schema() {
    let dir = std::env::temp_dir().join("congver-cli-single");
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("report.json");
    let out = run(&[
        "--p",
        "3",
        "--check",
        "lemma-char",
        "--check",
        "cuspidal-count",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["version"], "1");
    assert_eq!(report["environment"]["budget"], 10_000_000);
    let checks = report["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    for c in checks {
        assert_eq!(c["verdict"], "pass");
        assert_eq!(c["duration_ms"], 0);
        assert!(c.get("witness").is_none());
    }
    assert_eq!(report["totals"]["fail"], 0);
}

#[test]
fn unknown_check_is_usage_error() {
    let out = run(&["--check", "no-such-lemma"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_parse_error_reports_position() {
    let dir = std::env::temp_dir().join("congver-cli-badcfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.conf");
    std::fs::write(&cfg, "p = 3\nbudget == 7\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "stderr: {err}");
}

#[test]
fn budget_skip_exits_nonzero() {
    let dir = std::env::temp_dir().join("congver-cli-skip");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("skip.conf");
    std::fs::write(&cfg, "check = oldcrap-endomorphism p=3 i=3\n").unwrap();
    let out_path = dir.join("report.json");
    let out = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["checks"][0]["verdict"], "skipped-budget");
    assert_eq!(report["totals"]["skipped"], 1);
}

#[test]
fn failing_budget_flag_propagates() {
    // an absurdly small budget forces a skip on an otherwise passing check
    let out = run(&["--p", "3", "--check", "suma-decomposition", "--budget", "100"]);
    assert_eq!(out.status.code(), Some(1));
}

fn report_bytes(path: &Path, extra: &[&str]) -> Vec<u8> {
    let out = verify()
        .args(["--config", "default", "--out", path.to_str().unwrap()])
        .args(extra)
        .output()
        .expect("verify runs");
    assert!(
        out.status.success(),
        "default suite failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::read(path).unwrap()
}

#[test]
fn default_config_reports_are_byte_identical() {
    let dir = std::env::temp_dir().join("congver-cli-determinism");
    std::fs::create_dir_all(&dir).unwrap();
    let a = report_bytes(&dir.join("a.json"), &[]);
    let b = report_bytes(&dir.join("b.json"), &[]);
    assert!(!a.is_empty());
    assert_eq!(a, b, "two runs of `verify --config default` must match byte for byte");
}
