//! End-to-end checks of the `skelscan` binary: artifacts, exit codes, and
//! stderr tagging.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_skelscan"))
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("skelscan-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

const TWO_CLUSTERS: &str = "0,0\n0,0\n0,0\n0,0\n0,0\n10,0\n10,0\n";

#[test]
fn scan_reports_table_and_threshold() {
    let input = tmp("scan.csv");
    write(&input, TWO_CLUSTERS);
    let out = run(&[
        "scan",
        "--input",
        input.to_str().unwrap(),
        "--r",
        "1.0",
        "--nu",
        "1",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["table_len"], 2);
    assert_eq!(doc["table"][0]["count"], 5);
    assert_eq!(doc["threshold"]["k"], 2);
    assert_eq!(doc["threshold"]["covered"], 7);
}

#[test]
fn skeleton_emits_obj() {
    let input = tmp("skeleton.csv");
    write(&input, TWO_CLUSTERS);
    let out = run(&[
        "skeleton",
        "--input",
        input.to_str().unwrap(),
        "--r",
        "1.0",
        "--nu",
        "1",
        "--gap-factor",
        "15",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 2);
    assert_eq!(text.lines().filter(|l| l.starts_with("l ")).count(), 1);

    // With the default gap factor the two clusters are 10r apart, which is
    // past the splitting threshold: two one-vertex components, no segments.
    let out = run(&[
        "skeleton",
        "--input",
        input.to_str().unwrap(),
        "--r",
        "1.0",
        "--nu",
        "1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 2);
    assert_eq!(text.lines().filter(|l| l.starts_with("l ")).count(), 0);
}

#[test]
fn skeleton_high_s_warns_and_falls_back_to_json() {
    let input = tmp("skeleton-s3.csv");
    let mut rows = String::new();
    for i in 0..5 {
        for _ in 0..3 {
            rows.push_str(&format!("{}.0,0.0\n", i));
        }
    }
    write(&input, &rows);
    let out = run(&[
        "skeleton",
        "--input",
        input.to_str().unwrap(),
        "--r",
        "1.0",
        "--nu",
        "1",
        "--s",
        "3",
        "--format",
        "obj",
    ]);
    assert!(out.status.success(), "exit code should stay 0 on fallback");
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(serde_json::from_slice::<serde_json::Value>(&out.stdout).is_ok());
}

#[test]
fn generate_then_pipeline_round_trip() {
    let points = tmp("gen.csv");
    let truth = tmp("gen-truth.csv");
    let out = run(&[
        "generate",
        "--kind",
        "line",
        "--dim",
        "3",
        "--structured",
        "400",
        "--background",
        "50",
        "--noise-sigma",
        "0.05",
        "--seed",
        "7",
        "--output",
        points.to_str().unwrap(),
        "--truth-output",
        truth.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        std::fs::read_to_string(&points).unwrap().lines().count(),
        450
    );
    assert_eq!(std::fs::read_to_string(&truth).unwrap().lines().count(), 400);

    let out = run(&[
        "pipeline",
        "--input",
        points.to_str().unwrap(),
        "--r",
        "0.5",
        "--nu",
        "5",
        "--timing",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["k"].as_u64().unwrap() > 0);
    assert!(doc["metrics"]["vertex_coverage"].as_f64().unwrap() > 0.0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("timing: scan"));
}

#[test]
fn tune_emits_trace() {
    let input = tmp("tune.csv");
    write(&input, TWO_CLUSTERS);
    let out = run(&[
        "tune",
        "--input",
        input.to_str().unwrap(),
        "--nu0",
        "1000",
        "--r",
        "1.0",
        "--k-min",
        "1",
        "--k-max",
        "4",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["target"], "nu");
    // nu walks 1000 -> 100 -> 10 -> 1, where K(1) = 2 lands in [1, 4].
    assert_eq!(doc["result"]["trace"].as_array().unwrap().len(), 4);
    assert_eq!(doc["result"]["outcome"], "in-range");
    assert_eq!(doc["result"]["nu"], 1);
    assert_eq!(doc["result"]["k"], 2);
}

#[test]
fn baseline_regression_and_pca() {
    let input = tmp("baseline.csv");
    let rows: String = (0..30)
        .map(|i| format!("{},{}\n", i as f64 * 0.1, 2.0 * (i as f64 * 0.1) + 1.0))
        .collect();
    write(&input, &rows);
    let out = run(&["baseline", "regression", "--input", input.to_str().unwrap()]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["slope"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((doc["intercept"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let out = run(&["baseline", "pca", "--input", input.to_str().unwrap(), "--k", "2"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["directions"].as_array().unwrap().len(), 2);
    assert!(doc["variances"][1].as_f64().unwrap() < 1e-9);
}

#[test]
fn parse_errors_exit_2_with_location() {
    let input = tmp("bad.csv");
    write(&input, "1,2\n3\n");
    let out = run(&["scan", "--input", input.to_str().unwrap(), "--r", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"), "{stderr}");

    let missing = tmp("does-not-exist.csv");
    let out = run(&["scan", "--input", missing.to_str().unwrap(), "--r", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stage_errors_exit_3_with_stage_tag() {
    let input = tmp("stage.csv");
    write(&input, TWO_CLUSTERS);
    // Invalid grid step fails inside the scan stage.
    let out = run(&[
        "pipeline",
        "--input",
        input.to_str().unwrap(),
        "--r=-1.0",
        "--nu",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("scan:"), "{stderr}");

    // Vertical data fails the regression fit, not parsing.
    let vertical = tmp("vertical.csv");
    write(&vertical, "1,0\n1,5\n1,9\n");
    let out = run(&["baseline", "regression", "--input", vertical.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn pipeline_json_stable_across_runs_and_threads() {
    let input = tmp("det.csv");
    let out = run(&[
        "generate",
        "--kind",
        "clusters",
        "--clusters",
        "6",
        "--dim",
        "4",
        "--structured",
        "600",
        "--background",
        "100",
        "--noise-sigma",
        "0.02",
        "--seed",
        "99",
        "--output",
        input.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let mut outputs = Vec::new();
    for threads in ["1", "4", "1"] {
        let out = bin()
            .args([
                "pipeline",
                "--input",
                input.to_str().unwrap(),
                "--r",
                "0.5",
                "--nu",
                "10",
            ])
            .env("SKELSCAN_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}
