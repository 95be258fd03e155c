//! End-to-end checks of the command-line binary: exit codes, file outputs,
//! and flag-over-config precedence.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scatpole"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("scatpole-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn malformed_config_exits_2_without_outputs() {
    let dir = temp_dir("badcfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, r#"{"curve": {"kind": "disk", "radius": -1.0}}"#).unwrap();
    let out_dir = dir.join("out");
    let status = bin()
        .args(["poles", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    assert!(!out_dir.exists());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = temp_dir("unknown");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, r#"{"curvature": 3}"#).unwrap();
    let status = bin().args(["scan", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_flavor_flag_exits_2() {
    let status = bin().args(["poles", "--flavor", "triple"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn disk_oracle_writes_zero_table() {
    let dir = temp_dir("oracle");
    let status = bin()
        .args(["disk-oracle", "--nu-max", "3", "--output-dir"])
        .arg(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let json = std::fs::read_to_string(dir.join("disk_zeros.json")).unwrap();
    let records: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    assert_eq!(records.len(), 2);
    assert!(dir.join("disk_oracle_manifest.json").exists());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn poles_with_explicit_candidates_and_flag_precedence() {
    let dir = temp_dir("poles");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    // Config says n = 8; the flag below bumps it to 16 and must win.
    std::fs::write(
        &cfg,
        r#"{
            "flavor": "single",
            "n": 8,
            "targets": [[1.31, -1.68]],
            "refine": {"radius": 0.08, "m_quad": 32}
        }"#,
    )
    .unwrap();
    let out_dir = dir.join("out");
    let status = bin()
        .args(["poles", "--n", "16", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let json = std::fs::read_to_string(out_dir.join("poles.json")).unwrap();
    let records: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0]["n"].as_u64(), Some(16));
    let re = records[0]["kappa_re"].as_f64().unwrap();
    assert!((re - 1.308012032273949).abs() <= 1e-9);
    std::fs::remove_dir_all(&dir).unwrap();
}
