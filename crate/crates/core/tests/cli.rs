//! End-to-end runs of the `qam` binary.

use std::path::Path;
use std::process::{Command, Output};

use qam_core::constructions::FamilyArtifact;

fn qam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qam"))
        .args(args)
        .env_remove("QAM_THREADS")
        .output()
        .expect("run qam")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn mean_prints_fifteen_digits() {
    let o = qam(&["mean", "--generator", "log", "--entries", "1,4", "--weights", "0.5,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "2\n");
    let o = qam(&["mean", "--generator", "power:-1", "--entries", "1,2,4"]);
    assert_eq!(stdout(&o), "1.71428571428571\n");
}

#[test]
fn exit_codes() {
    assert_eq!(qam(&["mean", "--generator", "identity"]).status.code(), Some(2));
    assert_eq!(qam(&["bogus"]).status.code(), Some(2));
    let o = qam(&["compare", "--f", "power:2", "--g", "log@2,3", "--grid", "1,2,10"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(String::from_utf8(o.stderr).unwrap().lines().count(), 1);
    let o = Command::new(env!("CARGO_BIN_EXE_qam"))
        .args(["mean", "--generator", "identity", "--entries", "1,2"])
        .env("QAM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(qam(&["--help"]).status.code(), Some(0));
}

#[test]
fn diagnose_spec_examples() {
    let o = qam(&["diagnose", "--family", "constant:identity@0,1", "--tests", "empirical", "--points", "query=0,1,0.5"]);
    let out = stdout(&o);
    assert!(out.contains("\nempirical,64,0.5,ok\n"));
    assert!(out.contains("\nempirical,summary,bounded,"));

    let o = qam(&["diagnose", "--family", "power-seq@1,2", "--tests", "integral", "--n", "1..16", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for entry in v["reports"][0]["values"].as_array().unwrap() {
        let n = entry["n"].as_f64().unwrap();
        let want = (n - 1.0) * 2f64.ln();
        assert!((entry["value"].as_f64().unwrap() - want).abs() < 1e-8);
    }
}

#[test]
fn report_header_is_self_describing() {
    let o = qam(&["diagnose", "--family", "exp-seq@0,1", "--tests", "deriv-ratio", "--n-list", "1,2,4", "--zero-tol", "0.01"]);
    let out = stdout(&o);
    let header = out.lines().next().unwrap();
    let config: serde_json::Value = serde_json::from_str(header.strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(config["n"], serde_json::json!([1, 2, 4]));
    assert_eq!(config["thresholds"]["zero_tol"], 0.01);
    assert_eq!(config["thresholds"]["div_threshold"], 1000.0);
    assert_eq!(config["quadrature"]["method"], "adaptive-simpson");
    assert_eq!(config["points"], serde_json::json!(["pq=0.0,1.0"]));
    assert_eq!(out.lines().nth(1), Some("test,n,value,status"));
}

#[test]
fn config_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let report = dir.path().join("report.json");
    std::fs::write(
        &cfg,
        format!(
            "command = \"diagnose\"\nfamily = \"exp-seq:2@0,1\"\ntests = [\"deriv-ratio\"]\nn = \"1..8\"\nformat = \"json\"\noutput = {:?}\n",
            report.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = qam(&["diagnose", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["reports"][0]["values"][7]["value"], 16.0);

    // a flag overrides the file
    let o = qam(&["diagnose", "--config", cfg.to_str().unwrap(), "--n", "1..2", "--output", "/dev/stdout"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["reports"][0]["values"].as_array().unwrap().len(), 2);

    std::fs::write(&cfg, "family = \"exp-seq@0,1\"\nwindow = 3\n").unwrap();
    assert_eq!(qam(&["diagnose", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

fn construct(args: &[&str], path: &Path) -> FamilyArtifact {
    let mut all = vec!["construct"];
    all.extend_from_slice(args);
    all.extend(["--emit-family", path.to_str().unwrap(), "--certify"]);
    let o = qam(&all);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    FamilyArtifact::load(path).unwrap()
}

#[test]
fn prop51_artifact_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p51.json");
    let art = construct(&["prop51", "--target", "midpoint", "--eps", "0.1", "--n-max", "64"], &path);
    let cert = art.certificate.as_ref().unwrap();
    assert_eq!(cert.per_n_l1.len(), 64);
    assert!(cert.per_n_l1.iter().all(|&l| l < 0.1));
}

#[test]
fn prop53_round_trip_reproduces_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p53.json");
    let art = construct(&["prop53", "--interval", "0,1", "--k-max", "32"], &path);
    let query = &art.certificate.as_ref().unwrap().prop53.as_ref().unwrap().queries[0];
    assert!(query.per_n.windows(2).all(|w| w[1] > w[0]));

    let family = format!("file:{}", path.display());
    let o = qam(&[
        "diagnose", "--family", &family, "--tests", "integral", "--points", "pq=0.2,0.8", "--n", "1..32", "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let values = v["reports"][0]["values"].as_array().unwrap();
    assert_eq!(values.len(), 32);
    for (entry, want) in values.iter().zip(&query.per_n) {
        assert!((entry["value"].as_f64().unwrap() - want).abs() < 1e-8);
    }
    assert_eq!(v["reports"][0]["verdict"], "diverges_to_infinity");
}

#[test]
fn construct_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    let path = dir.path().join("fam.json");
    std::fs::write(
        &cfg,
        format!(
            "command = \"construct\"\n[construct]\nkind = \"prop51\"\ntarget = \"cantor:2\"\nn_max = 8\nemit_family = {:?}\ncertify = true\n",
            path.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = qam(&["construct", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let art = FamilyArtifact::load(&path).unwrap();
    assert_eq!(art.profiles.len(), 8);
    assert_eq!(art.certificate.unwrap().prop51.unwrap().target_points.len(), 8);
}
