//! End-to-end checks of the binary: flag handling, exit statuses,
//! output files, and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_equimetric"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn transform_prints_vector_and_generator() {
    let out = run(&[
        "transform", "--gamma", "2", "--omega", "3", "--tau", "10", "--sigma-e", "4",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["transformed"]["tau"], 23.0);
    assert_eq!(body["transformed"]["sigma_e"], 8.0);
    assert_eq!(body["transformed"]["anchor"], 1.0);
    assert!((body["generator"]["scale_rate"].as_f64().unwrap() - 2.0_f64.ln()).abs() < 1e-12);
    assert_eq!(body["manifest"]["command"], "transform");
}

#[test]
fn transform_identity_is_noop() {
    let out = run(&[
        "transform", "--gamma", "1", "--omega", "0", "--tau", "5", "--sigma-e", "2",
    ]);
    assert!(out.status.success());
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["transformed"]["tau"], 5.0);
    assert_eq!(body["transformed"]["sigma_e"], 2.0);
}

#[test]
fn transform_rejects_nonpositive_gamma_with_status_2() {
    let out = run(&["transform", "--gamma", "0", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("scale must be positive"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn json_flag_makes_errors_machine_readable() {
    let out = run(&["--json", "transform", "--gamma", "-1", "--tau", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert_eq!(err["kind"], "usage");
    assert!(err["error"].as_str().unwrap().contains("scale must be positive"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["transform", "--gamma", "2", "--tau", "1", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flow_symmetric_defaults_report_tiny_drift() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--out-dir", dir.path().to_str().unwrap(), "flow"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let drift: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("max_smd_drift = "))
        .expect("drift line present")
        .parse()
        .unwrap();
    assert!(drift < 1e-9, "symmetric drift {drift}");
    assert!(dir.path().join("flow_trace.csv").exists());
    assert!(dir.path().join("flow_trace.manifest.json").exists());
    let csv = String::from_utf8(read(&dir.path().join("flow_trace.csv"))).unwrap();
    assert!(csv.starts_with("t,mu1,mu2,sigma_pooled,smd\n"));
    assert_eq!(csv.lines().count(), 1002);
}

#[test]
fn flow_broken_variance_rate_reports_large_drift() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "flow",
            "--break-var-rate",
            "constant:1.5",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let drift: f64 = stdout(&out)
        .lines()
        .find_map(|l| l.strip_prefix("max_smd_drift = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(drift > 0.01, "broken drift only {drift}");
}

#[test]
fn flow_rejects_too_few_steps() {
    let out = run(&["flow", "--steps", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("steps must be at least 10"));
}

#[test]
fn flow_runaway_rate_exits_with_flow_status() {
    let out = run(&["flow", "--break-var-rate", "power:1000000,3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("variance collapse"));
}

#[test]
fn sweep_fixed_seed_is_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = bin()
            .args([
                "--out-dir",
                dir.path().to_str().unwrap(),
                "--seed",
                "7",
                "sweep",
                "--n",
                "1000",
            ])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(
        read(&dir_a.path().join("sweep.csv")),
        read(&dir_b.path().join("sweep.csv"))
    );
}

#[test]
fn sweep_reproduces_from_manifest() {
    let dir_a = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "--out-dir",
            dir_a.path().to_str().unwrap(),
            "--seed",
            "11",
            "sweep",
            "--n",
            "2000",
            "--gamma",
            "1.5",
            "--plot",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));

    let dir_b = tempfile::tempdir().unwrap();
    let manifest = dir_a.path().join("sweep.manifest.json");
    let out = bin()
        .args([
            "--out-dir",
            dir_b.path().to_str().unwrap(),
            "sweep",
            "--from-manifest",
            manifest.to_str().unwrap(),
            "--plot",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        read(&dir_a.path().join("sweep.csv")),
        read(&dir_b.path().join("sweep.csv"))
    );
    assert_eq!(
        read(&dir_a.path().join("sweep.svg")),
        read(&dir_b.path().join("sweep.svg"))
    );
}

#[test]
fn sweep_config_file_layers_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("sweep.conf");
    std::fs::write(&config_path, "n = 1000\nseed = 3\ngamma = 2.0\n").unwrap();
    let out = bin()
        .args([
            "--out-dir",
            dir.path().to_str().unwrap(),
            "sweep",
            "--config",
            config_path.to_str().unwrap(),
            "--gamma",
            "1.125",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let manifest: serde_json::Value =
        serde_json::from_slice(&read(&dir.path().join("sweep.manifest.json"))).unwrap();
    assert_eq!(manifest["config"]["n"], 1000);
    assert_eq!(manifest["config"]["seed"], 3);
    // flag wins over config file
    assert_eq!(manifest["config"]["gamma"], 1.125);
}

#[test]
fn sweep_rejects_bad_config_listing_fields() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("sweep.conf");
    std::fs::write(&config_path, "n = x\nwidth = 3\n").unwrap();
    let out = run(&["sweep", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = stderr(&out);
    assert!(text.contains("'n'"), "{text}");
    assert!(text.contains("'width'"), "{text}");
}

#[test]
fn sweep_rejects_zero_k_step() {
    let out = run(&["sweep", "--n", "1000", "--k-step", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("k_step"));
}

#[test]
fn verify_small_run_passes_and_prints_table() {
    let out = run(&["--seed", "5", "verify", "--n", "2000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("reliability-invariance"));
    assert!(text.contains("sed-ias-sqrt2"));
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_json_reports_all_checks() {
    let out = run(&["--json", "--seed", "5", "verify", "--n", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let body: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(body["checks"].as_array().unwrap().len(), 6);
}
