//! End-to-end tests for the `verify` binary: exit codes, report schema,
//! determinism, skip semantics, and CSV layout.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_verify"));
    cmd.env_remove("VERIFY_SEED");
    cmd
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("polycone-verify-test-{}-{name}", std::process::id()));
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn verify")
}

fn read_report(path: &PathBuf) -> Value {
    let text = std::fs::read_to_string(path).expect("report file exists");
    serde_json::from_str(&text).expect("report is valid JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

#[test]
fn usage_errors_exit_2() {
    let csv = tmp("bad-csv.csv");
    let cases: Vec<Vec<&str>> = vec![
        vec!["bogus-suite"],
        vec!["qform", "--n", "0"],
        vec!["qform", "--n", "51"],
        vec!["qform", "--threads", "0"],
        vec!["qform", "--tol-cluster", "-1"],
        vec!["qform", "--tol-real", "0"],
        vec!["n2", "--dump-csv", csv.to_str().unwrap()],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(code(&out), 2, "expected usage error for {args:?}");
    }

    let out = bin()
        .env("VERIFY_SEED", "not-a-number")
        .args(["n2", "--samples", "10"])
        .output()
        .expect("spawn verify");
    assert_eq!(code(&out), 2, "unparseable VERIFY_SEED must be a usage error");
}

#[test]
fn check_failure_exits_1_with_witness() {
    let report = tmp("forced-fail.json");
    let out = run(&[
        "nonintersect",
        "--n",
        "2",
        "--field",
        "c",
        "--samples",
        "50",
        "--tol-cluster",
        "0.9",
        "--tol-real",
        "0.9",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);

    let rep = read_report(&report);
    assert_eq!(rep["schema"], 1);
    assert_eq!(rep["pass"], false);
    let fails: Vec<&Value> = rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "fail")
        .collect();
    assert!(!fails.is_empty(), "a failing check must be recorded");
    for f in fails {
        assert!(
            f["worst_witness"].is_object(),
            "failing check {} must carry a witness",
            f["name"]
        );
    }
    std::fs::remove_file(&report).ok();
}

#[test]
fn report_schema_and_check_ordering() {
    let report = tmp("schema.json");
    let out = run(&[
        "n2",
        "--samples",
        "50",
        "--seed",
        "9",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let rep = read_report(&report);
    assert_eq!(rep["schema"], 1);
    assert_eq!(rep["suite"], "n2");
    assert_eq!(rep["seed"], 9);
    for key in ["n", "field", "samples", "tol_cluster", "tol_real"] {
        assert!(
            !rep["config"][key].is_null(),
            "config echo must include {key}"
        );
    }
    let checks = rep["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort_unstable();
    assert_eq!(names, sorted, "checks must be sorted by name");
    for c in checks {
        let status = c["status"].as_str().unwrap();
        assert!(matches!(status, "pass" | "fail" | "skip"));
        assert!(c["elapsed_ms"].is_u64());
    }

    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("suite n2:"), "summary line goes to stderr");
    std::fs::remove_file(&report).ok();
}

#[test]
fn stdout_json_when_no_report_flag() {
    let out = run(&["n2", "--samples", "30", "--seed", "4"]);
    assert_eq!(code(&out), 0);
    let rep: Value = serde_json::from_slice(&out.stdout).expect("stdout is the JSON report");
    assert_eq!(rep["suite"], "n2");
    assert_eq!(rep["pass"], true);
}

fn normalized(path: &PathBuf) -> Value {
    let mut rep = read_report(path);
    for c in rep["checks"].as_array_mut().unwrap() {
        c["elapsed_ms"] = 0.into();
    }
    rep["config"]["threads"] = Value::Null;
    rep
}

#[test]
fn reports_reproducible_across_runs_and_threads() {
    let (a, b, c) = (tmp("repro-a.json"), tmp("repro-b.json"), tmp("repro-c.json"));
    let base = ["qform", "--n", "2", "--samples", "200", "--seed", "11"];
    for (path, threads) in [(&a, "1"), (&b, "1"), (&c, "3")] {
        let mut args: Vec<&str> = base.to_vec();
        args.extend(["--threads", threads, "--report", path.to_str().unwrap()]);
        let out = run(&args);
        assert_eq!(code(&out), 0);
    }
    let (ra, rb, rc) = (normalized(&a), normalized(&b), normalized(&c));
    assert_eq!(ra, rb, "identical invocations must produce identical reports");
    assert_eq!(ra, rc, "thread count must not affect results");
    for p in [a, b, c] {
        std::fs::remove_file(p).ok();
    }
}

#[test]
fn samples_zero_runs_deterministic_checks_only() {
    let report = tmp("skip.json");
    let out = run(&[
        "qform",
        "--n",
        "2",
        "--samples",
        "0",
        "--seed",
        "1",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "skips must not fail the run");

    let rep = read_report(&report);
    assert_eq!(rep["pass"], true);
    let checks = rep["checks"].as_array().unwrap();
    let skipped: Vec<&Value> = checks.iter().filter(|c| c["status"] == "skip").collect();
    let passed = checks.iter().filter(|c| c["status"] == "pass").count();
    assert!(!skipped.is_empty(), "sampled checks must be skipped");
    assert!(passed > 0, "deterministic checks must still run");
    assert!(checks.iter().all(|c| c["status"] != "fail"));
    for s in skipped {
        let reason = s["worst_witness"]["reason"].as_str().unwrap_or("");
        assert!(
            reason.contains("sampling disabled"),
            "skip must state its reason, got {reason:?}"
        );
    }
    std::fs::remove_file(&report).ok();
}

#[test]
fn seed_env_fallback_and_flag_override() {
    let report = tmp("env-seed.json");
    let out = bin()
        .env("VERIFY_SEED", "123")
        .args([
            "n2",
            "--samples",
            "10",
            "--report",
            report.to_str().unwrap(),
        ])
        .output()
        .expect("spawn verify");
    assert_eq!(code(&out), 0);
    assert_eq!(read_report(&report)["seed"], 123, "VERIFY_SEED is the fallback");

    let out = bin()
        .env("VERIFY_SEED", "123")
        .args([
            "n2",
            "--samples",
            "10",
            "--seed",
            "5",
            "--report",
            report.to_str().unwrap(),
        ])
        .output()
        .expect("spawn verify");
    assert_eq!(code(&out), 0);
    assert_eq!(read_report(&report)["seed"], 5, "--seed overrides the env var");
    std::fs::remove_file(&report).ok();
}

#[test]
fn roots_csv_layout() {
    let csv = tmp("roots.csv");
    let report = tmp("roots.json");
    let out = run(&[
        "roots",
        "--n",
        "2",
        "--field",
        "c",
        "--samples",
        "25",
        "--seed",
        "2",
        "--dump-csv",
        csv.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);

    let text = std::fs::read_to_string(&csv).expect("csv written");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 25, "header plus one row per sample");

    let header: Vec<&str> = lines[0].split(',').collect();
    let expected = [
        "field", "sample", "t0_re", "t0_im", "t1_re", "t1_im", "t2_re", "t2_im", "t3_re",
        "t3_im", "z_re", "z_im", "root1_re", "root1_im", "root2_re", "root2_im", "root3_re",
        "root3_im",
    ];
    assert_eq!(header, expected, "complex columns come in re/im pairs");

    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), expected.len());
        assert_eq!(cols[0], "c");
        for cell in &cols[2..] {
            assert!(
                *cell == "inf" || cell.parse::<f64>().is_ok(),
                "numeric cell expected, got {cell:?}"
            );
        }
    }
    std::fs::remove_file(&csv).ok();
    std::fs::remove_file(&report).ok();
}
