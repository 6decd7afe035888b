use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assortment")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn example_file() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/example1.json").to_string_lossy().into_owned()
}

#[test]
fn example_one_eval() {
    let v = json(&run(&["eval", &example_file(), "{1}"]));
    let general = &v["general_distribution"];
    assert!((general["1"].as_f64().unwrap() - 0.72).abs() <= 1e-12);
    assert!((general["0"].as_f64().unwrap() - 0.28).abs() <= 1e-12);
    assert!((v["pi"].as_f64().unwrap() - 0.8).abs() <= 1e-15);
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = run(&["gen", "--seed", "7", "--n", "10", "--cbar", "3", "--ubar", "2", "-o", p.to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn brute_and_plub_agree_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let sol = dir.path().join("sol.json");
    let inst_s = inst.to_str().unwrap();
    assert!(run(&["gen", "--seed", "11", "--n", "10", "--cbar", "4", "--ubar", "3", "-o", inst_s]).status.success());
    let brute = json(&run(&["solve", inst_s, "--method", "brute"]));
    let plub = json(&run(&["solve", inst_s, "--method", "plub", "--pi-bounds", "-o", sol.to_str().unwrap()]));
    let (zb, zp) = (brute["objective"].as_f64().unwrap(), plub["objective"].as_f64().unwrap());
    assert!((zb - zp).abs() <= 1e-8 * zb.max(1.0));
    assert_eq!(brute["instance_ref"], plub["instance_ref"]);
    let eval = json(&run(&["eval", inst_s, sol.to_str().unwrap()]));
    assert!((eval["objective"].as_f64().unwrap() - zp).abs() <= 1e-12);
    let warm = json(&run(&["solve", inst_s, "--method", "plub", "--warm-start", "greedy"]));
    assert!((warm["objective"].as_f64().unwrap() - zp).abs() <= 1e-8);
    assert_eq!(warm["method"], "g-plub");
}

#[test]
fn mismatched_solution_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let sol = dir.path().join("sol.json");
    run(&["gen", "--seed", "1", "--n", "6", "--cbar", "2", "--ubar", "1", "-o", a.to_str().unwrap()]);
    run(&["gen", "--seed", "2", "--n", "6", "--cbar", "2", "--ubar", "1", "-o", b.to_str().unwrap()]);
    run(&["solve", a.to_str().unwrap(), "--method", "greedy", "-o", sol.to_str().unwrap()]);
    let out = run(&["eval", b.to_str().unwrap(), sol.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["solve", "--no-such-flag"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"format_version":1,"n":1,"revenue":[1.0],"constraint":{"type":"unconstrained"},
            "u_bar":1,"mnl_weight":[1.0],"leave_prob":[0.5],"eta":[[1.5]]}"#,
    )
    .unwrap();
    assert_eq!(run(&["solve", bad.to_str().unwrap()]).status.code(), Some(2));
    let inst = dir.path().join("big.json");
    run(&["gen", "--seed", "3", "--n", "24", "--cbar", "8", "--ubar", "5", "-o", inst.to_str().unwrap()]);
    let out = run(&["solve", inst.to_str().unwrap(), "--time-limit", "0.001"]);
    assert_eq!(out.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "time_limit");
    assert!(v["gap"].as_f64().unwrap() > 0.0);
}

#[test]
fn unconstrained_ladder_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("u.json");
    let s = inst.to_str().unwrap();
    run(&["gen", "--seed", "5", "--n", "12", "--ubar", "1", "-o", s]);
    let ladder = json(&run(&["solve", s, "--method", "uncon-u1"]));
    let brute = json(&run(&["solve", s, "--method", "brute"]));
    assert_eq!(ladder["objective"], brute["objective"]);
    let cmp = json(&run(&["compare-mnl", s]));
    assert!(cmp["gap"].as_f64().unwrap() >= 0.0);
}

#[test]
fn multicat_and_knapsack() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    let ms = m.to_str().unwrap();
    let out = run(&["gen", "--seed", "4", "--n", "8", "--cbar", "2", "--ubar", "2", "--categories", "1;3", "--weights", "0.5,0.5", "-o", ms]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let plub = json(&run(&["solve", "--multicat", ms, "--method", "plub"]));
    let brute = json(&run(&["solve", ms, "--method", "brute"]));
    assert!((plub["objective"].as_f64().unwrap() - brute["objective"].as_f64().unwrap()).abs() <= 1e-8);
    let k = dir.path().join("k.json");
    let ks = k.to_str().unwrap();
    let out = run(&["gen", "--seed", "4", "--n", "4", "--ubar", "1", "--mu", "2.5", "--gamma", "1,1,1.5,2", "-o", ks]);
    assert!(out.status.success());
    let g = json(&run(&["solve", ks, "--method", "greedy"]));
    assert_eq!(g["status"], "heuristic");
}

#[test]
fn bench_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite.json");
    std::fs::write(
        &suite,
        r#"{"cells":[{"n":8,"c_bar":2,"u_bar":1,"seeds":[1,2]},{"n":8,"c_bar":2,"u_bar":3,"seeds":[1,2]}],
            "methods":["plub","greedy"],"record_timing":false}"#,
    )
    .unwrap();
    let report = dir.path().join("report.csv");
    let a = run(&["bench", "--suite", suite.to_str().unwrap(), "-o", report.to_str().unwrap(), "--csv"]);
    let b = run(&["bench", "--suite", suite.to_str().unwrap(), "--csv", "--workers", "2"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read(&report).unwrap(), a.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
}
