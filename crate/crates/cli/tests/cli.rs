use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_qmetro");

fn qmetro(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

fn manifest_for(path: &Path) -> std::path::PathBuf {
    format!("{}.manifest.json", path.display()).into()
}

#[test]
fn sweep_csv_header_is_stable() {
    let out = qmetro(&[
        "sweep", "--model", "qutrit", "--axis", "alpha", "--start", "0.2", "--stop", "1.2",
        "--count", "3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "theta,J_alpha_alpha,J_alpha_beta,J_alpha_phi,J_beta_beta,J_beta_phi,J_phi_phi,\
         F_alpha_beta,F_alpha_phi,F_beta_phi,gamma,sld_crb,attainable_qcrb,sandwich_mid,\
         sandwich_gamma"
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn sweep_identity_weight_leaves_attainable_column_empty() {
    let out = qmetro(&[
        "sweep", "--model", "qubit", "--axis", "theta", "--start", "0.5", "--stop", "1.0",
        "--count", "2", "--weight", "identity",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 10);
    assert_eq!(row[7], "");
}

#[test]
fn geometry_reports_qutrit_closed_form() {
    let out = qmetro(&[
        "geometry",
        "--model",
        "qutrit",
        "--theta",
        "0.7853981633974483,0,0",
    ]);
    assert!(out.status.success());
    let v = json(&out.stdout);
    let j = &v["J"];
    assert_eq!(j[0][0].as_f64().unwrap(), 2.0);
    assert!((j[1][1].as_f64().unwrap() - 0.75).abs() < 1e-11);
    assert!((j[1][2].as_f64().unwrap() + 0.25).abs() < 1e-11);
    assert!((v["F"][0][1].as_f64().unwrap() - 0.5).abs() < 1e-11);
    assert!((v["gamma"].as_f64().unwrap() - 1.0).abs() < 1e-11);
}

#[test]
fn out_of_domain_input_exits_2() {
    let out = qmetro(&["geometry", "--model", "qutrit", "--theta", "2,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
    assert_eq!(
        qmetro(&["topology", "--model", "ququart"]).status.code(),
        Some(2)
    );
    assert_eq!(qmetro(&["audit", "--n-models", "0"]).status.code(), Some(2));
    assert_eq!(
        qmetro(&["geometry", "--model", "qudit"]).status.code(),
        Some(2)
    );
}

#[test]
fn audit_negative_control_exits_3_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("audit.json");
    let out = qmetro(&[
        "audit",
        "--n-models",
        "30",
        "--inject-corrupt-f",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&std::fs::read(&path).unwrap());
    assert_eq!(v["passed"], false);
    assert_eq!(v["checks"]["curvature_antisymmetry"]["failed"], 30);
    assert_eq!(v["checks"]["gamma_at_most_one"]["failed"], 0);
}

#[test]
fn zero_amplitude_protocol_exits_3() {
    let out = qmetro(&["protocol", "--amplitude", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("constant"));
}

#[test]
fn outputs_carry_manifests_and_replay_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("t1.json");
    let second = dir.path().join("t2.json");
    let args = ["topology", "--model", "qutrit", "--grid", "20,8,8", "--out"];
    let run = |p: &Path| {
        let mut a: Vec<&str> = args.to_vec();
        a.push(p.to_str().unwrap());
        qmetro(&a)
    };
    assert!(run(&first).status.success());
    let manifest = json(&std::fs::read(manifest_for(&first)).unwrap());
    assert_eq!(manifest["command"], "topology");
    assert_eq!(manifest["config"]["grid"], serde_json::json!([20, 8, 8]));
    assert!(manifest["version"].is_string() && manifest["timestamp"].is_string());

    let replay = qmetro(&[
        "replay",
        "--manifest",
        manifest_for(&first).to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(replay.status.success());
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap()
    );
    assert!(manifest_for(&second).exists());
}
