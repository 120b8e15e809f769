//! End-to-end exercises of the binary: fixtures, determinism, exit codes,
//! and schema validity of emitted reports.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hyperquasi"));
    cmd.env_remove("HYPERQUASI_BUDGET");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn hyperquasi")
}

fn edge_lines(path: &Path) -> usize {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')).count() - 1
}

#[test]
fn gen_complete_graph_has_all_edges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k5.hg");
    let o = run(&["gen", "--n", "5", "--k", "2", "--p", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(edge_lines(&out), 10);
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("edges=10"), "stats line: {stderr}");
}

#[test]
fn gen_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.hg");
    let b = dir.path().join("b.hg");
    for out in [&a, &b] {
        let o = run(&[
            "gen", "--n", "12", "--k", "3", "--p", "0.5", "--seed", "9",
            "--allow-loops", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn gen_planted_bias_keeps_density_near_p() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("planted.hg");
    let o = run(&[
        "gen", "--n", "40", "--k", "3", "--p", "0.5", "--bias", "0.4", "--seed", "3",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let stderr = String::from_utf8(o.stderr).unwrap();
    let density: f64 = stderr
        .split("density=")
        .nth(1)
        .and_then(|s| s.trim().parse().ok())
        .expect("density in stats line");
    assert!((density - 0.5).abs() < 0.05, "density {density}");
}

#[test]
fn missing_required_flag_is_usage_error() {
    let o = run(&["gen", "--n", "5", "--k", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_partition_flag_is_usage_error() {
    let o = run(&["analyze", "--n", "6", "--k", "2", "--pi", "0+1"]);
    assert_eq!(o.status.code(), Some(1));
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("\"error\""), "structured error: {stderr}");
}

#[test]
fn analyze_complete_graph_fixtures_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let hg = dir.path().join("k30.hg");
    let report = dir.path().join("k30.json");
    assert!(run(&["gen", "--n", "30", "--k", "2", "--p", "1", "--out", hg.to_str().unwrap()])
        .status
        .success());
    let o = run(&["analyze", hg.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert!(o.status.success());

    let json = std::fs::read_to_string(&report).unwrap();
    hyperquasi::analysis::validate_report_json(&json).expect("report validates against schema");
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let p = &v["partitions"][0];
    assert!((p["lambda1"]["lower"].as_f64().unwrap() - 29.0).abs() < 1e-6);
    assert!((p["lambda1"]["upper"].as_f64().unwrap() - 29.0).abs() < 1e-6);
    assert!((p["lambda2"]["lower"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((p["lambda2"]["upper"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["meta"]["wall_time_ms"].as_u64(), Some(0));
}

#[test]
fn analyze_random_graph_mu_ratio_fixture() {
    let o = run(&["analyze", "--n", "40", "--k", "2", "--p", "0.5", "--seed", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let mu_ratio = v["partitions"][0]["mu_ratio"].as_f64().unwrap();
    assert!(mu_ratio <= 0.25, "mu2/mu1 = {mu_ratio}");
}

#[test]
fn analyze_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = run(&[
            "analyze", "--n", "10", "--k", "3", "--p", "0.5", "--seed", "4",
            "--pi", "2+1", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn budget_flag_exceeded_exits_2() {
    let o = run(&["analyze", "--n", "30", "--k", "2", "--p", "0.5", "--budget", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8(o.stderr).unwrap();
    assert!(stderr.contains("budget"), "structured error: {stderr}");
}

#[test]
fn budget_env_var_is_honored() {
    let o = bin()
        .args(["analyze", "--n", "30", "--k", "2", "--p", "0.5"])
        .env("HYPERQUASI_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_quick_passes_and_names_every_suite() {
    let o = run(&["verify", "--level", "quick"]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    for suite in [
        "last-mode-representation",
        "basis-independence",
        "pair-swap-invariance",
        "power-matrix-symmetry",
        "power-chain-upper-bounds",
        "bracket-order",
        "all-ones-factorization",
        "circuit-oracle-equivalence",
        "gadget-census",
        "gadget-ordering-robustness",
        "graph-specialization",
        "closed-form-spectra",
        "norm-chain",
        "t2-psd",
    ] {
        assert!(stdout.contains(&format!("PASS {suite}")), "missing {suite} in:\n{stdout}");
    }
}

#[test]
fn experiment_csv_is_sorted_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = run(&[
            "experiment", "--k", "2", "--p", "0.5", "--n", "8,6", "--seeds", "2,1",
            "--bias", "0.3", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let csv_a = std::fs::read_to_string(a.with_extension("csv")).unwrap();
    let csv_b = std::fs::read_to_string(b.with_extension("csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    assert_eq!(
        std::fs::read(a.with_extension("json")).unwrap(),
        std::fs::read(b.with_extension("json")).unwrap()
    );

    let mut lines = csv_a.lines();
    assert_eq!(lines.next(), Some(hyperquasi::analysis::CSV_HEADER));
    let keys: Vec<(usize, u64, String)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[5].parse().unwrap(), f[0].to_string())
        })
        .collect();
    assert_eq!(keys.len(), 8);
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn experiment_config_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    let out = dir.path().join("sweep");
    let cfg = hyperquasi::analysis::ExperimentConfig::new(2, 0.5, vec![6], vec![1], None);
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let o = run(&[
        "experiment", "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(report["config"]["k"], 2);
    assert_eq!(report["rows"].as_array().unwrap().len(), 1);
}
