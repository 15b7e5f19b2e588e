use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gapkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_solve_matches_planted_label() {
    let dir = tempfile::tempdir().unwrap();
    for (label, seed) in [("yes", "1"), ("no", "2")] {
        let file = dir.path().join(format!("{label}.json"));
        let g = gapkit(&["gen", "--problem", "svp01", "--n", "6", "--dim", "6", "--label", label, "--seed", seed, "--out", path(&file)]);
        assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
        let s = gapkit(&["solve", "--in", path(&file), "--expect", label]);
        assert_eq!(s.status.code(), Some(0));
        assert_eq!(json(&s)["label"], label.to_uppercase());
    }
}

#[test]
fn expect_mismatch_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bcp.json");
    let g = gapkit(&["gen", "--problem", "bcp", "--n", "8", "--dim", "3", "--label", "yes", "--out", path(&file)]);
    assert!(g.status.success());
    assert_eq!(gapkit(&["solve", "--in", path(&file), "--expect", "no"]).status.code(), Some(1));
    assert_eq!(gapkit(&["solve", "--in", path(&file), "--strategy", "pruned", "--expect", "yes"]).status.code(), Some(0));
}

#[test]
fn usage_and_runtime_errors_exit_two() {
    assert_eq!(gapkit(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gapkit(&["solve", "--in", "/nonexistent/instance.json"]).status.code(), Some(2));
    assert_eq!(gapkit(&["params", "--k", "1"]).status.code(), Some(2));
}

#[test]
fn reduce_writes_instances_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("l.json");
    let out = dir.path().join("out");
    assert!(gapkit(&["gen", "--problem", "svp01", "--n", "6", "--dim", "6", "--seed", "3", "--out", path(&file)]).status.success());
    let r = gapkit(&["reduce", "--kind", "lattice-bcp", "--in", path(&file), "--out-dir", path(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(out.join("instance_0.json").exists());
    assert!(out.join("instance_1.json").exists());
    let prov: Value = serde_json::from_str(&std::fs::read_to_string(out.join("provenance.json")).unwrap()).unwrap();
    assert_eq!(prov["recombination"], "OR");
    assert_eq!(prov["instances"].as_array().unwrap().len(), 2);
}

#[test]
fn split_list_solve_returns_satisfying_assignment() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    assert!(gapkit(&["gen", "--problem", "cnf", "--n", "8", "--seed", "1", "--out", path(&file)]).status.success());
    let s = json(&gapkit(&["solve", "--in", path(&file)]));
    let o = json(&gapkit(&["solve", "--in", path(&file), "--strategy", "oracle"]));
    assert_eq!(s["label"], o["label"]);
    if s["label"] == "YES" {
        assert_eq!(s["witness"]["assignment"].as_array().unwrap().len(), 8);
    }
}

#[test]
fn verify_claims_pass() {
    for claim in ["set-identity", "mitm", "embedding", "pipeline", "batching", "barrier"] {
        let v = gapkit(&["verify", "--claim", claim, "--n", "5", "--seeds", "4"]);
        let text = String::from_utf8_lossy(&v.stdout);
        assert_eq!(v.status.code(), Some(0), "{text}");
        assert!(text.starts_with(&format!("claim {claim}: PASS")));
    }
}

#[test]
fn params_report_gap_and_batch_size() {
    let k = json(&gapkit(&["params", "--k", "3"]));
    assert_eq!(k["gamma"], "2");
    let b = json(&gapkit(&["params", "--N", "1025", "--c", "2", "--delta", "1/2", "--delta-prime", "1/4"]));
    assert_eq!(b["batch"]["ell"], 33);
}

#[test]
fn gadget_search_reports_gap_three() {
    let g = gapkit(&["gadget", "search", "--d", "1", "--grid", "0,1,2,3", "--scale", "3"]);
    assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
    let v = json(&g);
    assert_eq!(v["assignments"], 256);
    assert_eq!(v["exceeding_three"], 0);
}

#[test]
fn bench_emits_csv_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let b = gapkit(&["bench", "--problem", "bcp", "--solver", "brute", "--sizes", "16,32,64,128", "--seeds", "1", "--out", path(&csv)]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "problem,solver,N,n,d,seed,verdict,distance_evals,structure_builds,structure_queries,candidates_materialized,wall_time_ns"
    );
    assert_eq!(lines.count(), 4);
    assert!(String::from_utf8_lossy(&b.stdout).contains("slope=2.000000") || String::from_utf8_lossy(&b.stderr).contains("slope=2.000000"));
}
