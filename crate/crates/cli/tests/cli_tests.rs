//! End-to-end checks of the `nblab` binary: output shape, documented
//! values, exit codes, and byte-level reproducibility.

use std::process::{Command, Output};

fn nblab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nblab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = nblab(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn dist_scan_reports_documented_d1() {
    let text = stdout(&["dist", "--preset", "bd", "--n-max", "4"]);
    let header: Vec<&str> = text
        .lines()
        .find(|l| !l.starts_with('#'))
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(
        header,
        vec!["n", "d_n_sq", "slack", "dn_sq_times_log_n", "C_over_log_n"]
    );
    let first = text.lines().find(|l| l.starts_with("1,")).unwrap();
    let d1: f64 = first.split(',').nth(1).unwrap().parse().unwrap();
    assert!((d1 - 0.858213).abs() < 1e-4, "d1^2 = {d1}");
    // rows are nonincreasing in the distance column
    let ds: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('n'))
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ds.len(), 4);
    assert!(ds.windows(2).all(|w| w[1] <= w[0] + 1e-4));
}

#[test]
fn zeta_prints_value_at_origin() {
    let text = stdout(&["zeta", "--t", "0"]);
    assert!(text.contains("-1.4603545"), "output was: {text}");
}

#[test]
fn muntz_check_passes_and_exits_zero() {
    let out = nblab(&[
        "muntz-check",
        "--dist",
        "exp:1",
        "--samples",
        "20000",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("all_within_4_stderr: true"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(nblab(&["dist", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(
        nblab(&["gnb", "--basis", "cauchy:1"]).status.code(),
        Some(2)
    );
    // missing mandatory seed on a Monte Carlo subcommand
    assert_eq!(
        nblab(&["muntz-check", "--dist", "exp:1"]).status.code(),
        Some(2)
    );
}

#[test]
fn numeric_errors_exit_three_with_error_json() {
    let out = nblab(&["nu", "--n", "0"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    let doc: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(doc["error"]["kind"], "precondition");
}

#[test]
fn resource_errors_carry_achievable_tolerance() {
    // Far-too-tight tolerance: the breakpoint budget cannot reach it.
    let out = nblab(&["dist", "--preset", "bd", "--n-max", "2", "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    let doc: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(doc["error"]["kind"], "resource");
    assert!(doc["error"]["achievable_tol"].as_f64().unwrap() > 1e-12);
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "vn", "--n", "3", "--eps", "0.1", "--preset", "concentrated", "--vartheta", "1",
        "--samples", "1500", "--seed", "11", "--points", "4",
    ];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn thread_count_does_not_change_output() {
    let base = [
        "pnb", "--basis", "exp:1,exp:2,exp:3", "--tol", "1e-5",
    ];
    let one: Vec<&str> = base.iter().copied().chain(["--threads", "1"]).collect();
    let four: Vec<&str> = base.iter().copied().chain(["--threads", "4"]).collect();
    assert_eq!(stdout(&one), stdout(&four));

    let mc_base = [
        "muntz-check", "--dist", "gamma:2:3", "--samples", "20000", "--seed", "3",
    ];
    let mc_one: Vec<&str> = mc_base.iter().copied().chain(["--threads", "1"]).collect();
    let mc_two: Vec<&str> = mc_base.iter().copied().chain(["--threads", "2"]).collect();
    assert_eq!(stdout(&mc_one), stdout(&mc_two));
}

#[test]
fn config_file_supplies_values_and_flags_override() {
    let dir = std::env::temp_dir();
    let cfg = dir.join("nblab_cli_test_cfg.json");
    std::fs::write(&cfg, r#"{"subcommand":"nu","n":2,"eps":0.3,"tol":1e-6}"#).unwrap();
    let from_file = stdout(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(from_file.contains("2,0.3,"));
    // flag overrides the file's eps
    let overridden = stdout(&[
        "nu",
        "--config",
        cfg.to_str().unwrap(),
        "--eps",
        "0.5",
    ]);
    assert!(overridden.contains("2,0.5,"), "{overridden}");
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn json_format_embeds_resolved_config() {
    let text = stdout(&["zeta", "--t", "2", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["command"], "zeta");
    assert_eq!(doc["config"]["t"], 2.0);
    assert!(doc["timestamp_unix"].as_u64().is_some());
    assert_eq!(doc["columns"][0], "t");
}

#[test]
fn grid_cache_roundtrip_via_crosscheck() {
    let dir = std::env::temp_dir();
    let cache = dir.join("nblab_cli_grid_cache.csv");
    std::fs::remove_file(&cache).ok();
    let args = [
        "crosscheck", "--n", "1", "--T", "60", "--grid-cache", cache.to_str().unwrap(),
    ];
    let first = stdout(&args);
    assert!(cache.exists(), "cache file written");
    let second = stdout(&args); // now loaded from cache
    assert_eq!(first, second);
    std::fs::remove_file(&cache).ok();
}
