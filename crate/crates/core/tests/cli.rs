use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mechcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mechcat"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, json: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn squeeze_writes_manifest_and_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = mechcat(&["squeeze", "--out", out.to_str().unwrap(), "--threads", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "squeeze");
    for file in manifest["artifacts"].as_array().unwrap() {
        assert!(out.join(file.as_str().unwrap()).exists());
    }
    let csv = fs::read_to_string(out.join("wigner_squeezed.csv")).unwrap();
    assert!(csv.starts_with("beta_re,beta_im,W\n"));
    assert!(!csv.contains(';'));
}

#[test]
fn overwrite_needs_force() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    fs::write(tmp.path().join("old.txt"), "x").unwrap();
    assert_eq!(mechcat(&["squeeze", "--out", out]).status.code(), Some(2));
    assert_eq!(mechcat(&["squeeze", "--out", out, "--force"]).status.code(), Some(0));
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = write_config(tmp.path(), "a.json", r#"{"task": {"photons": 2}}"#);
    assert_eq!(mechcat(&["subtract", "--config", &unknown]).status.code(), Some(2));
    let parity = write_config(tmp.path(), "b.json", r#"{"task": {"n": 1, "parity": "even"}}"#);
    assert_eq!(mechcat(&["subtract", "--config", &parity]).status.code(), Some(2));
    assert_eq!(mechcat(&["subtract", "--config", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(mechcat(&["squeeze", "--grid-scale", "-1"]).status.code(), Some(2));
    assert_eq!(mechcat(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn unstable_drive_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"schedule": {"red1": {"power_w": 5e-5}, "blue1": {"power_w": 8e-5}}}"#,
    );
    let o = mechcat(&["squeeze", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("squeeze"));
}

#[test]
fn subtract_reports_scalars() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "d.json", r#"{"task": {"n": 2, "alpha": [1.2], "transmissivity": 0.46}}"#);
    let o = mechcat(&["subtract", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let scalars: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let r = &scalars["results"][0];
    assert_eq!(r["parity"], "even");
    assert!((r["fidelity"].as_f64().unwrap() - 0.97).abs() < 0.02);
}

#[test]
fn oracle_check_passes_on_figure_states() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "e.json",
        r#"{"task": {"sweeps": {"cases": [{"n": 2, "transmissivity": 0.46, "alpha": 1.2}]}}}"#,
    );
    let out = tmp.path().join("oracle");
    let o = mechcat(&["oracle-check", "--config", &cfg, "--random", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("oracle_report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["outcomes"].as_array().unwrap().len(), 2);
}
