use std::fs;
use std::process::{Command, Output};

use lft::PipelineConfig;

fn lft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lft")).args(args).output().unwrap()
}

#[test]
fn print_default_config_parses_back() {
    let out = lft(&["config", "print-default"]);
    assert!(out.status.success());
    let cfg: PipelineConfig = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cfg, PipelineConfig::default());
}

#[test]
fn stages_run_one_at_a_time() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for stage in [&["sample", "--k", "30"][..], &["evaluate"], &["label"], &["train"], &["prune", "--cf", "0.1"], &["rules"]] {
        let out = lft(&[stage, &["--out-dir", d, "--jobs", "2"]].concat());
        assert!(out.status.success(), "{stage:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = lft(&["validate", "--out-dir", d, "--objective", "eff", "--rule", "d>2, n>2, m>3", "--class", "e", "--k", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("validation_eff.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(dir.path().join("tree_light.dot").is_file());
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("cfg.json");
    fs::write(&cfg_path, r#"{"k": 12, "seed": 3}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = lft(&["sample", "--config", cfg_path.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(out_dir.join("designs.csv")).unwrap().lines().count(), 13);
}

#[test]
fn errors_exit_non_zero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = lft(&["pipeline", "--k", "0", "--out-dir", d]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("k must be at least 1"));
    let out = lft(&["train", "--out-dir", d]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("dataset.csv"));
    let out = lft(&["sweep", "--variable", "q", "--out-dir", d]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown variable"));
}
