use std::path::Path;
use std::process::{Command, Output};

fn copqaoa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_copqaoa")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = copqaoa(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_solve_agree() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("k.txt");
    ok(&["gen", "--n", "12", "--seed", "3", "--out", p(&inst)]);
    let dp = json(&ok(&["solve", "--instance", p(&inst), "--method", "dp"]));
    let brute = json(&ok(&["solve", "--instance", p(&inst), "--method", "brute"]));
    let bnb = json(&ok(&["solve", "--instance", p(&inst), "--method", "bnb"]));
    let greedy = json(&ok(&["solve", "--instance", p(&inst), "--method", "greedy"]));
    assert_eq!(dp["value"], brute["value"]);
    assert_eq!(dp["value"], bnb["value"]);
    assert!(greedy["value"].as_f64().unwrap() <= dp["value"].as_f64().unwrap());
    let out = dir.path().join("r.json");
    ok(&["solve", "--instance", p(&inst), "--out", p(&out)]);
    assert_eq!(json(&std::fs::read_to_string(out).unwrap())["value"], dp["value"]);
}

#[test]
fn uc_scan_writes_curve() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("uc.txt");
    ok(&["gen", "--family", "uc", "--n", "6", "--seed", "2", "--out", p(&inst)]);
    let curve = dir.path().join("curve.csv");
    let r = json(&ok(&["uc-scan", "--instance", p(&inst), "--grid", "50", "--out", p(&curve)]));
    assert!(r["cost"].as_f64().unwrap() > 0.0);
    let text = std::fs::read_to_string(curve).unwrap();
    assert!(text.starts_with("D,cost,feasible\n"));
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn qaoa_commands_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("k.txt");
    ok(&["gen", "--n", "8", "--seed", "5", "--out", p(&inst)]);

    let run = dir.path().join("run");
    let r = json(&ok(&[
        "qaoa-run", "--instance", p(&inst), "--shots", "2000", "--seed", "1", "--out", p(&run),
        "--gammas", "0.002,0.001", "--betas", "0.5,-0.3",
    ]));
    assert_eq!(r["params"]["gammas"].as_array().unwrap().len(), 2);
    let rep = json(&ok(&["report", "--dir", p(&run)]));
    assert_eq!(rep["valid_ratio"], r["valid_ratio"]);
    assert_eq!(rep["approximation_ratio"], r["approximation_ratio"]);

    let grid = dir.path().join("grid");
    ok(&["qaoa-grid", "--instance", p(&inst), "--points", "4", "--shots", "1000", "--out", p(&grid)]);
    assert!(grid.join("heatmap.svg").exists() && grid.join("heatmap.csv").exists());

    let train = dir.path().join("train");
    let t = json(&ok(&[
        "qaoa-train", "--instance", p(&inst), "--depth", "2", "--restarts", "2", "--budget", "5", "--grid-init",
        "--grid-points", "3", "--shots", "1000", "--out", p(&train),
    ]));
    assert_eq!(t["params"]["betas"].as_array().unwrap().len(), 2);
    assert!(train.join("trace.json").exists());
}

#[test]
fn config_and_manifest_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a");
    let cfg = dir.path().join("cfg.json");
    let config = serde_json::json!({
        "instance": {"kind": "inverse_strongly_correlated", "n": 9, "seed": 2},
        "method": "copqaoa",
        "seed": 4,
        "shots": 3000,
        "out_dir": out,
        "copqaoa": {"depth": 1, "restarts": 2, "optimizer_budget": 6}
    });
    std::fs::write(&cfg, config.to_string()).unwrap();
    let first = ok(&["--config", p(&cfg)]);
    let metrics = std::fs::read(out.join("metrics.json")).unwrap();
    let samples = std::fs::read(out.join("samples.csv")).unwrap();
    let second = ok(&["--config", p(&out.join("manifest.json"))]);
    assert_eq!(first, second);
    assert_eq!(std::fs::read(out.join("metrics.json")).unwrap(), metrics);
    assert_eq!(std::fs::read(out.join("samples.csv")).unwrap(), samples);
}

#[test]
fn errors_are_reported() {
    let out = copqaoa(&[]);
    assert!(!out.status.success());
    let out = copqaoa(&["solve", "--instance", "/nonexistent/file.txt"]);
    assert!(!out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    let out = copqaoa(&["qaoa-run", "--instance", "x", "--out", "y", "--gammas", "0.1", "--betas", "0.1,0.2"]);
    assert!(!out.status.success());
}
