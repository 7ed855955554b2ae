use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn crwa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crwa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn header(csv: &str) -> &str {
    csv.lines().find(|l| !l.starts_with('#')).expect("header row")
}

#[test]
fn inversion_writes_all_backends() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = crwa(&[
        "inversion", "--g", "0.06", "--alpha-sq", "10", "--backends", "rwa,crwa,exact",
        "--tau-max", "40", "-o", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(header(&text), "tau,W_rwa,W_crwa,W_exact");
    assert!(text.lines().next().unwrap().starts_with("# rabi-crwa "));
    assert!(text.contains("# config: {\"command\":\"inversion\""));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 2001);
    // W(0) = 1 for every backend except the CRWA, which starts at 1 - alpha^2 g^2
    let w0: Vec<f64> = rows[0].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(w0[0], 0.0);
    assert!((w0[1] - 1.0).abs() < 1e-12 && (w0[3] - 1.0).abs() < 1e-9);
    assert!((w0[2] - (1.0 - 10.0 * 0.06 * 0.06)).abs() < 1e-6);
}

#[test]
fn identical_config_gives_identical_bytes() {
    let args = ["components", "--g", "0.1", "--tau-max", "5", "--n-points", "101"];
    let a = crwa(&args);
    let b = crwa(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let value = String::from_utf8(a.stdout).unwrap();
    let row = value.lines().last().unwrap();
    // 17 significant digits
    assert!(row.split(',').all(|v| v.split('e').next().unwrap().trim_start_matches('-').len() == 18));
}

#[test]
fn power_writes_spectrum_and_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.csv");
    let out = crwa(&[
        "power", "--g", "0.2", "--alpha-sq", "10", "--backends", "crwa", "-o", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(header(&fs::read_to_string(&path).unwrap()), "nu,P_crwa");
    let preds: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("spec.predictions.json")).unwrap()).unwrap();
    let labels: Vec<&str> = preds["predictions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["label"].as_str().unwrap())
        .collect();
    assert!(labels.contains(&"rabi") && labels.contains(&"Omega_d_k2"));
    assert!((preds["bin_width"].as_f64().unwrap() - std::f64::consts::PI / 100.0).abs() < 1e-15);
}

#[test]
fn peaks_json_has_stable_keys() {
    let out = crwa(&["peaks", "--g", "0.06", "--backends", "exact", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let first = &doc["rows"][0];
    for key in ["backend", "label", "order", "predicted", "detected", "distance_bins", "matched"] {
        assert!(!first[key].is_null(), "missing {key}");
    }
    let matched = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["order"] == 1)
        .all(|r| r["matched"] == true);
    assert!(matched);
}

#[test]
fn svg_output() {
    let out = crwa(&["envelopes", "--g", "0.15", "--tau-max", "10", "--n-points", "201", "--format", "svg"]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<polyline").count(), 6);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"g": 0.3, "n_max": 2, "format": "json"}"#).unwrap();
    let out = crwa(&["levels", "--config", cfg.to_str().unwrap(), "--g", "0.05"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["g"], 0.05);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        &["inversion", "--g", "-0.1"][..],
        &["inversion", "--backends", "rwa,qed"],
        &["power", "--format", "xml"],
        &["nonsense"],
        &["levels", "--config", "/nonexistent/run.json"],
    ] {
        let out = crwa(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"g": 0.1, "coupling": 2}"#).unwrap();
    assert_eq!(crwa(&["levels", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn help_per_subcommand() {
    for sub in ["levels", "inversion", "components", "envelopes", "power", "peaks", "validate"] {
        let out = crwa(&[sub, "--help"]);
        assert!(out.status.success());
        assert!(String::from_utf8_lossy(&out.stdout).contains("--alpha-sq"));
    }
}

#[test]
fn failed_run_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = crwa(&["inversion", "--g", "0", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!Path::new(&path).exists());
}

#[test]
fn validate_quick_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = crwa(&["validate", "--quick", "--format", "json", "-o", path.to_str().unwrap()]);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let criteria = doc["report"]["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 10);
    let all_passed = doc["report"]["all_passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if all_passed { 0 } else { 2 }));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count(), 10);
}
