use std::path::Path;
use std::process::{Command, Output};

fn sac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sac")).args(args).output().expect("binary runs")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    assert_eq!(text.trim_end().lines().count(), 1, "{text}");
    serde_json::from_str(text.trim_end()).expect("one-line json error")
}

#[test]
fn wave_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("kink.csv");
    let res = sac(&["wave", "--delta", "0", "--L", "20", "--n", "4001", "--out", out.to_str().unwrap()]);
    assert!(res.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# c="));
    assert_eq!(lines.next().unwrap(), "x,m");
    assert_eq!(lines.count(), 4001);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("kink.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "wave");
    assert_eq!(manifest["config"]["n"], 4001);
}

#[test]
fn gamma_constraint_is_named() {
    let res = sac(&["noise-stats", "--gamma", "0.8"]);
    assert!(!res.status.success());
    let err = stderr_json(&res);
    assert_eq!(err["error"], "invalid_parameter");
    assert!(err["message"].as_str().unwrap().contains("gamma < 2/3"));
}

#[test]
fn beta_constraint_is_named() {
    let res = sac(&["lemma2", "--beta", "2.5"]);
    assert!(!res.status.success());
    assert!(stderr_json(&res)["message"].as_str().unwrap().contains("1 < beta < 2"));
}

#[test]
fn missing_config_is_a_file_error() {
    let res = sac(&["compare", "--config", "missing.json"]);
    assert!(!res.status.success());
    let err = stderr_json(&res);
    assert_eq!(err["error"], "io");
    assert!(err["message"].as_str().unwrap().contains("missing.json"));
}

#[test]
fn unknown_flag_is_rejected() {
    let res = sac(&["wave", "--bogus"]);
    assert!(!res.status.success());
    assert_eq!(stderr_json(&res)["error"], "usage");
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 3, "eps": [0.1, 0.05], "T": 0.5}"#).unwrap();
    let out = dir.path().join("out");
    let args = ["lemma2", "--config", cfg.to_str().unwrap(), "--eps", "0.05", "0.025", "0.0125", "--out-dir", out.to_str().unwrap()];
    assert!(sac(&args).status.success());
    let csv = std::fs::read_to_string(out.join("lemma2.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 2);
    assert!(!csv.contains("\n0.1,"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("lemma2.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["config"]["T"], 0.5);
}

fn report_bytes(dir: &Path) -> (Vec<u8>, Vec<u8>) {
    let args = ["report", "--eps", "0.08", "0.04", "--T", "0.02", "--out-dir", dir.to_str().unwrap()];
    assert!(sac(&args).status.success());
    (std::fs::read(dir.join("report.csv")).unwrap(), std::fs::read(dir.join("report.json")).unwrap())
}

#[test]
fn report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = report_bytes(&dir.path().join("a"));
    let b = report_bytes(&dir.path().join("b"));
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a.0).unwrap().lines().count(), 3);
}

#[test]
fn simulate_and_flow_emit_expected_columns() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.csv");
    assert!(sac(&["simulate", "--eps", "0.08", "--T", "0.01", "--noise", "off", "--out", sim.to_str().unwrap()]).status.success());
    assert!(std::fs::read_to_string(&sim).unwrap().starts_with("t,radius,l2_dist,xi_value\n0,"));
    for mode in ["sde", "smbmc", "front"] {
        let res = sac(&["flow", "--mode", mode, "--sign", "minus", "--T", "0.01"]);
        assert!(res.status.success(), "{mode}");
        assert!(String::from_utf8(res.stdout).unwrap().starts_with("t,radius,forcing\n"));
    }
}
