use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tqd(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tqd"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("TQD_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(str::to_owned).collect()
}

fn manifests(dir: &Path) -> usize {
    fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".toml"))
        .count()
}

#[test]
fn transfer_reaches_second_cavity() {
    let dir = tempfile::tempdir().unwrap();
    let out = tqd(dir.path(), &["transfer", "--check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,p1,p_m,p2");
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!(last[3] >= 0.99);
    assert_eq!(manifests(dir.path()), 1);
    let manifest = fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
    assert!(manifest.contains("[manifest]"));
    assert!(manifest.contains("command = \"transfer\""));
}

#[test]
fn delay_range_gives_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let out = tqd(dir.path(), &["scan-delay", "--range", "-0.6:0.6:0.05", "--check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&dir.path().join("scan.csv"));
    assert_eq!(rows.len(), 25);
    assert!(rows[12].starts_with("0.0000000000000000e0,"));
    assert_eq!(manifests(dir.path()), 1);
}

#[test]
fn fig2_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = tqd(dir.path(), &["fig2-suite", "--check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("fig2_summary.csv").exists());
    assert_eq!(manifests(dir.path()), 1);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(tqd(dir.path(), &["bogus"]).status.code(), Some(2));
    assert_eq!(tqd(dir.path(), &["transfer", "--nu", "fast"]).status.code(), Some(2));
}

#[test]
fn negative_rate_in_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[dissipation]\nkappa = -0.1\n").unwrap();
    let out = tqd(&dir.path().join("out"), &["transfer", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappa"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[system]\ndelat = 40.0\n").unwrap();
    let out = tqd(&dir.path().join("out"), &["transfer", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_directory_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_tqd"))
        .current_dir(dir.path())
        .env("TQD_OUT_DIR", &target)
        .arg("derive-pulse")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(target.join("pulses.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,G1,G2,theta_dot,ratio");
    assert_eq!(manifests(&target), 1);
    assert!(!dir.path().join("tqd-out").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["scan-detuning", "--values", "40,80"];
    assert!(tqd(a.path(), &args).status.success());
    assert!(tqd(b.path(), &args).status.success());
    let x = fs::read(a.path().join("scan.csv")).unwrap();
    let y = fs::read(b.path().join("scan.csv")).unwrap();
    assert_eq!(x, y);
    assert_eq!(data_rows(&a.path().join("scan.csv")).len(), 2);
}

#[test]
fn resolved_config_round_trips_through_manifest() {
    let dir = tempfile::tempdir().unwrap();
    assert!(tqd(&dir.path().join("first"), &["transfer", "--delta", "60"]).status.success());
    let manifest = dir.path().join("first").join("manifest.toml");
    let out = tqd(&dir.path().join("second"), &["transfer", "--config", manifest.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(dir.path().join("first/trajectory.csv")).unwrap(),
        fs::read(dir.path().join("second/trajectory.csv")).unwrap()
    );
}

#[test]
fn trajectories_flag_writes_point_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = tqd(dir.path(), &["scan-delay", "--values", "-0.1,0.1", "--pulse", "g2", "--trajectories"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("point_000.csv").exists());
    assert!(dir.path().join("point_001.csv").exists());
}
