use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_netform"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

/// Generates a fixture and splits it into instance, stable and empty network files.
fn fixture_files(dir: &Path, family: &str, n: &str, alpha: &str) -> [String; 4] {
    let o = run(&["gen", family, "--n", n, "--alpha", alpha]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let bundle: Value = stdout_json(&o);
    let paths = ["bundle.json", "instance.json", "stable.json", "empty.json"].map(|f| dir.join(f));
    fs::write(&paths[0], &o.stdout).unwrap();
    fs::write(&paths[1], bundle["instance"].to_string()).unwrap();
    fs::write(&paths[2], bundle["stable"].to_string()).unwrap();
    fs::write(&paths[3], r#"{"edges":[]}"#).unwrap();
    paths.map(|p| p.to_str().unwrap().to_string())
}

#[test]
fn check_exit_codes() {
    let dir = scratch("check");
    let [_, inst, stable, empty] = fixture_files(&dir, "general-bse", "4", "2");

    let o = run(&["check", &inst, &stable, "--concept", "bse"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["verdict"], "stable");

    // no single pair can reconnect four isolated nodes
    assert_eq!(code(&run(&["check", &inst, &empty, "--concept", "ps"])), 0);
    let o = run(&["check", &inst, &empty, "--concept", "bse"]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["verdict"], "unstable");
    assert_eq!(v["witness"]["concept"], "BSE");

    let o = run(&["check", &inst, &stable, "--concept", "bse", "--max-evaluations", "3"]);
    assert_eq!(code(&o), 2);
    assert_eq!(stdout_json(&o)["verdict"], "inconclusive");

    let o = run(&["check", &inst, &stable, "--concept", "bse", "--inexact"]);
    assert_eq!(code(&o), 0);
    let o = run(&["check", &inst, &stable, "--concept", "bse", "--inexact", "1e-6"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn input_errors_exit_3() {
    let dir = scratch("errors");
    let [_, inst, ..] = fixture_files(&dir, "general-bse", "4", "1");
    let bad = dir.join("bad.json");
    fs::write(&bad, r#"{"edges":[[0,9]]}"#).unwrap();
    assert_eq!(code(&run(&["check", &inst, bad.to_str().unwrap(), "--concept", "ps"])), 3);
    assert_eq!(code(&run(&["check", "/no/such/file", &inst, "--concept", "ps"])), 3);
    assert_eq!(code(&run(&["check", &inst, &inst, "--concept", "xyz"])), 3);
    assert_eq!(code(&run(&["gen", "general-bse", "--n", "4", "--alpha", "0"])), 3);
    assert_eq!(code(&run(&["gen", "general-bse", "--n", "4", "--alpha", "a/b"])), 3);
    let nonmetric = dir.join("nonmetric.json");
    fs::write(&nonmetric, r#"{"version":1,"n":3,"alpha":1,"metric_hint":true,"weights":[[0,1,3],[1,0,1],[3,1,0]]}"#)
        .unwrap();
    assert_eq!(code(&run(&["opt", nonmetric.to_str().unwrap()])), 3);
}

#[test]
fn gen_and_verify_round_trip() {
    let dir = scratch("verify");
    let [bundle, ..] = fixture_files(&dir, "metric-star", "5", "16");
    let o = run(&["verify-fixture", &bundle]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let o = run(&["gen", "metric-star", "--n", "5", "--alpha", "16", "--variant", "bne"]);
    assert_eq!(stdout_json(&o)["concept"], "BNE");

    // a bundle that claims the wrong ratio is a bound violation
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&bundle).unwrap()).unwrap();
    v["expected_ratio"] = Value::String("99".into());
    let tampered = dir.join("tampered.json");
    fs::write(&tampered, v.to_string()).unwrap();
    assert_eq!(code(&run(&["verify-fixture", tampered.to_str().unwrap()])), 4);

    // swapping in the complete network makes the stability claim false
    v["stable"] = serde_json::json!({ "edges": [[0,1],[0,2],[0,3],[0,4],[1,2],[1,3],[1,4],[2,3],[2,4],[3,4]] });
    fs::write(&tampered, v.to_string()).unwrap();
    assert_eq!(code(&run(&["verify-fixture", tampered.to_str().unwrap()])), 1);
}

#[test]
fn opt_is_exact_on_the_general_fixture() {
    let dir = scratch("opt");
    let [_, inst, ..] = fixture_files(&dir, "general-bse", "5", "3");
    let o = run(&["opt", &inst, "--exact"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    // 2α + 2(n-1)
    assert_eq!(v["opt"]["cost"], "14");
    assert_eq!(v["opt"]["proven"], true);
}

#[test]
fn dynamics_and_poa() {
    let dir = scratch("dynamics");
    let [_, inst, stable, _] = fixture_files(&dir, "metric-star", "5", "4");
    let o = run(&["dynamics", &inst, "--concept", "ps", "--policy", "best-response", "--max-steps", "50"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["trace"]["outcome"]["kind"], "equilibrium");
    assert!(!v["trace"]["steps"].as_array().unwrap().is_empty());

    let o = run(&["dynamics", &inst, "--from", &stable, "--concept", "ps"]);
    assert_eq!(code(&o), 0);
    assert!(stdout_json(&o)["trace"]["steps"].as_array().unwrap().is_empty());

    let o = run(&["dynamics", &inst, "--concept", "ps", "--max-steps", "0"]);
    assert_eq!(code(&o), 2);

    let o = run(&["poa", &inst, "--concept", "ps"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["point"]["complete"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["holds"] == true || c["advisory"] == true));
}

#[test]
fn sweep_outputs_are_deterministic() {
    let dir = scratch("sweep");
    let cfg = dir.join("sweep.json");
    fs::write(
        &cfg,
        r#"{"family":{"kind":"random","model":{"model":"uniform","lo":1,"hi":10},"instances":2},
            "n_min":4,"n_max":4,"alphas":["1/2",2],"concept":"ps","seed":7}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = run(&["sweep", cfg, "--jsonl"]);
    let b = run(&["sweep", cfg, "--jsonl"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<Value> =
        String::from_utf8(a.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|r| r["instance_seed"].is_u64()));

    let t = run(&["sweep", cfg]);
    assert_eq!(code(&t), 0);
    assert_eq!(String::from_utf8(t.stdout).unwrap().lines().count(), 5);

    let broken = dir.join("broken.json");
    fs::write(&broken, r#"{"family":{"kind":"random","model":{"model":"uniform","lo":1,"hi":10}},"n_min":4,"n_max":4,"alphas":[1]}"#).unwrap();
    assert_eq!(code(&run(&["sweep", broken.to_str().unwrap()])), 3);
}

#[test]
fn props_runs_seeded() {
    let a = run(&["props", "--seed", "5", "--trials", "40"]);
    let b = run(&["props", "--seed", "5", "--trials", "40"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8(a.stdout).unwrap().contains("single-removal"));
    assert_eq!(code(&run(&["props", "--trials", "0"])), 3);
}
