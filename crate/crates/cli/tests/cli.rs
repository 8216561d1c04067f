//! End-to-end runs of the `rankin-lab` binary.

use std::path::Path;
use std::process::{Command, Output};

fn lab(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankin-lab"))
        .arg("--cache-dir")
        .arg(cache)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_kind(o: &Output) -> String {
    assert!(!o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).expect("error is JSON");
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn eigen_writes_cache() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&lab(dir.path(), &["eigen", "--weight", "24", "--coeffs", "500"]));
    assert!(out.contains("24"));
    let cache: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("eigen_k24.json")).unwrap()).unwrap();
    assert_eq!(cache["dim"], 2);
    assert_eq!(cache["forms"].as_array().unwrap().len(), 2);
}

#[test]
fn moment_sweep_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("moments.json");
    let args = ["moments", "--weights", "12:40:2", "--g", "delta12", "--json", json_path.to_str().unwrap()];
    let first = stdout(&lab(dir.path(), &args));
    let first_json = std::fs::read(&json_path).unwrap();
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines.len(), 16);
    assert_eq!(
        lines[0],
        "k,dim,g_id,first_moment_harmonic,main_term,error_term,second_moment,nonvanishing_count,max_k_omega_over_logk,calibration_const"
    );
    assert!(lines[2].starts_with("14,0,delta12,"));
    // Second run reads the caches written by the first.
    let second = stdout(&lab(dir.path(), &args));
    assert_eq!(first, second);
    assert_eq!(first_json, std::fs::read(&json_path).unwrap());
}

#[test]
fn lvalue_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&lab(dir.path(), &["lvalue", "--weight", "12", "--coeffs", "2000"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "k,f_index,g_index,central_value,afe_error_estimate");
    let value: f64 = lines[1].split(',').nth(3).unwrap().parse().unwrap();
    assert!((value + 0.7382813095).abs() < 1e-8, "{value}");
}

#[test]
fn cache_version_mismatch_is_fatal() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&lab(dir.path(), &["eigen", "--weight", "12", "--coeffs", "300"]));
    let path = dir.path().join("eigen_k12.json");
    let mut cache: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    cache["format_version"] = serde_json::json!(999);
    std::fs::write(&path, serde_json::to_vec(&cache).unwrap()).unwrap();
    let o = lab(dir.path(), &["eigen", "--weight", "12", "--coeffs", "300"]);
    assert_eq!(error_kind(&o), "cache");
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn strict_refuses_short_cache() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&lab(dir.path(), &["eigen", "--weight", "12", "--coeffs", "300"]));
    let o = lab(dir.path(), &["--strict", "eigen", "--weight", "12", "--coeffs", "600"]);
    assert_eq!(error_kind(&o), "cache");
    // Without --strict the cache is regenerated.
    stdout(&lab(dir.path(), &["eigen", "--weight", "12", "--coeffs", "600"]));
    stdout(&lab(dir.path(), &["--strict", "eigen", "--weight", "12", "--coeffs", "600"]));
}

#[test]
fn invalid_arguments_report_json_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(dir.path(), &["eigen", "--weight", "13"]);
    assert_eq!(error_kind(&o), "invalid_argument");
    let o = lab(dir.path(), &["--precision-bits", "128", "bessel-verify"]);
    assert_eq!(error_kind(&o), "invalid_argument");
    let o = lab(dir.path(), &["no-such-command"]);
    assert_eq!(error_kind(&o), "usage");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cache_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rankin-lab"))
        .env("RANKIN_LAB_CACHE", dir.path())
        .args(["eigen", "--weight", "16", "--coeffs", "200"])
        .output()
        .unwrap();
    stdout(&o);
    assert!(dir.path().join("eigen_k16.json").exists());
}

#[test]
fn kloosterman_and_petersson_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&lab(dir.path(), &["kloosterman", "--field-disc", "5", "--alpha", "2,1", "--max-norm", "50"]));
    assert!(out.lines().count() > 10);
    for line in out.lines().skip(1) {
        let ratio: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(ratio <= 1.0 + 1e-9);
    }
    let out = stdout(&lab(dir.path(), &["petersson-check", "--weights", "12:24:4"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["max_gap"].as_f64().unwrap() < 1e-8);
}
