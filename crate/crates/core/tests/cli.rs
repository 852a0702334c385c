use hitrun::cli::ExperimentConfig;
use std::path::Path;
use std::process::{Command, Output};

fn hitrun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hitrun")).args(args).output().unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    hitrun(&all)
}

fn write_config(dir: &Path, json: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn sample_is_byte_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run_in(a.path(), &["sample", "--seed", "7"]).status.code(), Some(0));
    assert_eq!(run_in(b.path(), &["sample", "--seed", "7"]).status.code(), Some(0));
    for f in ["trace.csv", "summary.json", "resolved_config.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let trace = std::fs::read_to_string(a.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("step,x_0,x_1,moved\n"));
    assert_eq!(trace.lines().count(), 1002);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 7);
}

#[test]
fn resolved_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"body": {"kind": "ball", "center": [0, 0, 0], "radius": 2}, "chain": {"kind": "ball_walk", "delta": 0.5, "n_steps": 20}}"#,
    );
    assert_eq!(run_in(dir.path(), &["sample", "--config", &cfg, "--seed", "3"]).status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("resolved_config.json")).unwrap();
    let parsed = ExperimentConfig::from_json(&text).unwrap();
    assert_eq!(parsed.seed, 3);
    assert_eq!(parsed.resolved().unwrap(), parsed);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let acceptance = summary["acceptance"].as_f64().unwrap();
    assert!(acceptance > 0.0 && acceptance <= 1.0);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), r#"{"chain": {"steps": 10}}"#);
    let out = run_in(dir.path(), &["sample", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("steps"));
    let neg = write_config(dir.path(), r#"{"body": {"kind": "cube", "dim": 2, "half_width": -1}}"#);
    assert_eq!(run_in(dir.path(), &["sample", "--config", &neg]).status.code(), Some(2));
    assert_eq!(run_in(dir.path(), &["sample", "--config", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(hitrun(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"chain": {"init": [5, 5]}}"#);
    let out = run_in(dir.path(), &["sample", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_passes_by_default_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["verify"]).status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify.json")).unwrap()).unwrap();
    assert_eq!(report["all_pass"], true);
    let anchors: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["anchor"].as_str().unwrap()).collect();
    for a in ["Eq. hit-and-run_transition", "Eq. COV-bl", "Eq. mu_t_sde", "Lemma K_r_size"] {
        assert!(anchors.contains(&a), "{a}");
    }

    let cfg = write_config(dir.path(), r#"{"verify": {"bounds": {"cap_n100": 0}}}"#);
    let out = run_in(dir.path(), &["verify", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap_n100"));
}

#[test]
fn mix_writes_one_row_per_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"chain": {"lazy": true}, "mix": {"checkpoints": [10, 100]}}"#);
    assert_eq!(run_in(dir.path(), &["mix", "--config", &cfg, "--threads", "1"]).status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("mixing.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("step,tv,se,phi_s\n"));
}

#[test]
fn conductance_rejects_unbalanced_partitions() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["conductance"]).status.code(), Some(0));
    let cfg = write_config(dir.path(), r#"{"conductance": {"offset": -0.98, "s": 0.1, "n_samples": 2000}}"#);
    let out = run_in(dir.path(), &["conductance", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precondition"));
}

#[test]
fn logconcave_table_covers_the_library() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["logconcave"]).status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("logconcave.csv")).unwrap();
    let densities: std::collections::BTreeSet<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    let checks: std::collections::BTreeSet<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert!(densities.len() >= 4 && checks.len() >= 6, "{densities:?} {checks:?}");
}

#[test]
fn sl_writes_path_and_one_dimensional_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"sl": {"checkpoints": [0.5, 1], "n_paths": 2, "checkpoint_samples": 200, "one_d": {"n_paths": 4, "n_steps": 8}}}"#,
    );
    assert_eq!(run_in(dir.path(), &["sl", "--config", &cfg]).status.code(), Some(0));
    let trace = std::fs::read_to_string(dir.path().join("sl_trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 5);
    let one_d = std::fs::read_to_string(dir.path().join("sl1d.csv")).unwrap();
    assert!(one_d.starts_with("t,mean,variance,variance_se,right_mass\n"));
}
