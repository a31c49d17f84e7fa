use std::path::Path;
use std::process::Command;

use onebit::harness::ExperimentConfig;

fn onebit(args: &[&str]) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_onebit"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "onebit {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn small_config(dir: &Path) -> String {
    let mut cfg = ExperimentConfig::small();
    cfg.seeds = vec![5, 6];
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn generate_recover_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let data = dir.path().join("data");
    let data = data.to_str().unwrap();
    onebit(&["generate", "--config", &cfg, "--seed", "3", "--out", data]);
    for f in ["signal.json", "matrix.obr", "measurements.json"] {
        assert!(Path::new(data).join(f).exists(), "{f}");
    }
    let out = onebit(&[
        "recover", "--config", &cfg, "--seed", "3", "--out", data, "--algo", "bfcs", "--penalty",
        "l1", "--robust", "--epsilon", "0.05",
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["algorithm"], "bfcs");
    assert_eq!(report["config"]["robust"], true);
    let report_path = dir.path().join("report.json");
    std::fs::write(&report_path, &out.stdout).unwrap();

    let out = onebit(&[
        "evaluate", "--config", &cfg, "--seed", "3", "--out", data, "--report",
        report_path.to_str().unwrap(),
    ]);
    let metrics: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(metrics["mse"].as_f64().unwrap() < 1e-3);
}

#[test]
fn experiment_writes_table_shaped_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("run");
    onebit(&["experiment", "--config", &cfg, "--seeds", "9", "--out", out.to_str().unwrap()]);
    let table = std::fs::read_to_string(out.join("table.csv")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(
        lines[0],
        "metric,BIHT,BIHT-l2,BFCS,BFCS-l2,RoBIHT,RoBIHT-l2,RoBFCS,RoBFCS-l2"
    );
    let rows: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(rows, ["MAE", "MSE", "PER", "HE", "AE"]);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 9));
    let raw = std::fs::read_to_string(out.join("raw.csv")).unwrap();
    assert_eq!(raw.lines().count(), 1 + 8);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seeds"], serde_json::json!([9]));
}

#[test]
fn sweep_prints_tuned_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = onebit(&["sweep", "--config", &cfg, "--variants", "BFCS,RoBIHT"]);
    let tuned: Vec<(String, serde_json::Value)> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(tuned.len(), 2);
    assert_eq!(tuned[0].0, "BFCS");
    assert!([0.02, 0.1].contains(&tuned[0].1["epsilon"].as_f64().unwrap()));
}

#[test]
fn invalid_flags_fail_cleanly() {
    let out = Command::new(env!("CARGO_BIN_EXE_onebit"))
        .args(["experiment", "--d", "6"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("multiple of 4"));
}
