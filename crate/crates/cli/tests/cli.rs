//! Exit codes, schema rejection, and output behaviour of the executable.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ris")
}

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

#[test]
fn bundled_configs_run_and_write_files() {
    let tmp = tempfile::tempdir().unwrap();
    for (cmd, cfg, outputs) in [
        ("coupling", "coupling_16.json", vec!["coupling_16.csv"]),
        (
            "overhead",
            "overhead_sweep.json",
            vec!["overhead_sweep.csv", "overhead_sweep_optima.csv"],
        ),
        (
            "scatter",
            "scatter_steer.json",
            vec!["scatter_steer.csv", "scatter_steer_summary.csv"],
        ),
        ("bandwidth", "bandwidth_cases.json", vec!["bandwidth_cases.csv"]),
    ] {
        let out = Command::new(bin())
            .args([
                cmd,
                "--config",
                config_dir().join(cfg).to_str().unwrap(),
                "--out",
                tmp.path().to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{cmd} failed: {out:?}");
        for name in outputs {
            let path = tmp.path().join(name);
            assert!(path.exists(), "{name} missing");
            let text = std::fs::read_to_string(path).unwrap();
            assert!(text.lines().count() >= 1, "{name} has a header");
        }
    }
}

#[test]
fn coupling_csv_matches_library_eigenvalues() {
    let tmp = tempfile::tempdir().unwrap();
    let status = Command::new(bin())
        .args([
            "coupling",
            "--config",
            config_dir().join("coupling_16.json").to_str().unwrap(),
            "--out",
            tmp.path().to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(tmp.path().join("coupling_16.csv")).unwrap();
    let parsed: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    let arr = ris_core::CoupledArray::new(ris_core::ArrayGeometry::new(4, 0.5).unwrap()).unwrap();
    let expect = arr.sorted_eigenvalues();
    assert_eq!(parsed.len(), expect.len());
    for (p, e) in parsed.iter().zip(&expect) {
        assert_eq!(p.to_bits(), e.to_bits(), "CSV must round-trip exactly");
    }
}

#[test]
fn malformed_config_exits_2_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, r#"{"workflow":"coupling","coupling":{"n_side":4}}"#).unwrap();
    let out_dir = tmp.path().join("out");
    let out = Command::new(bin())
        .args([
            "coupling",
            "--config",
            bad.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists() || std::fs::read_dir(&out_dir).unwrap().next().is_none());
}

#[test]
fn unknown_keys_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"workflow":"coupling","coupling":{"n_side":4,"spacing":0.5},"bogus":true}"#,
    )
    .unwrap();
    let out = Command::new(bin())
        .args(["coupling", "--config", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bogus"), "diagnostic names the key: {err}");
}

#[test]
fn workflow_subcommand_mismatch_exits_2() {
    let out = Command::new(bin())
        .args([
            "scatter",
            "--config",
            config_dir().join("coupling_16.json").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unstable_configuration_exits_3_and_echoes_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("unstable.json");
    std::fs::write(
        &cfg,
        r#"{
  "workflow": "scatter",
  "scatter": {
    "n_side": 2,
    "spacing": 0.5,
    "load": { "active": { "gain": 50.0, "inner": { "phased": { "phases": [0.0, 0.0, 0.0, 0.0] } } } },
    "incident": [ { "theta": 0.0, "phi": 0.0 } ],
    "model": "exact"
  }
}"#,
    )
    .unwrap();
    let out = Command::new(bin())
        .args([
            "scatter",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            tmp.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unstable"), "stderr: {err}");
    assert!(err.contains("offending configuration"));
    assert!(err.contains("\"gain\": 50.0"));
}

#[test]
fn routing_gains_fall_like_one_over_k() {
    let tmp = tempfile::tempdir().unwrap();
    let status = Command::new(bin())
        .args([
            "routing",
            "--config",
            config_dir().join("routing_share.json").to_str().unwrap(),
            "--jobs",
            "4",
            "--out",
            tmp.path().to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(tmp.path().join("routing_share.csv")).unwrap();
    let mut by_k: std::collections::BTreeMap<i64, Vec<f64>> = Default::default();
    for line in text.lines().skip(1) {
        let mut cells = line.split(',');
        let k: i64 = cells.next().unwrap().parse().unwrap();
        let _draw = cells.next().unwrap();
        let gain: f64 = cells.next().unwrap().parse().unwrap();
        by_k.entry(k).or_default().push(gain);
    }
    let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
    let m1 = mean(&by_k[&1]);
    let m2 = mean(&by_k[&2]);
    let m4 = mean(&by_k[&4]);
    assert!((m1 - 1.0).abs() < 1e-9, "single route keeps full gain: {m1}");
    assert!(m2 < 0.65 && m2 > 0.35, "K=2 mean {m2}");
    assert!(m4 < 0.325 && m4 > 0.175, "K=4 mean {m4}");
}
