use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn weave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weave")).args(args).env_remove("WEAVE_BUDGET").output().expect("binary runs")
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn gen_relabel_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.json");
    let spec = r#"{"kind":"degenerate_bandwidth_h","n":60,"d":2,"beta":4,"r":2}"#;
    let o = weave(&["--seed", "3", "gen", "--spec", spec, "--out", h.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read(&h);
    assert_eq!(doc["n"], 60);
    assert_eq!(doc["certificate"]["type"], "labelling");

    let out = dir.path().join("pi.json");
    let trace = dir.path().join("trace.json");
    let o = weave(&["relabel", "--in", h.to_str().unwrap(), "--d", "2", "--beta", "4", "--out", out.to_str().unwrap(), "--trace", trace.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let pi = read(&out);
    let mut labels: Vec<u64> = pi["labelling"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    labels.sort_unstable();
    assert_eq!(labels, (1..=60).collect::<Vec<_>>());
    assert_eq!(read(&trace)["steps"].as_array().unwrap().len(), 60);
}

#[test]
fn gen_is_reproducible_per_seed() {
    let spec = r#"{"kind":"dense_rpartite_g","sizes":[10,12],"p":0.5}"#;
    let a = weave(&["--seed", "9", "gen", "--spec", spec]);
    let b = weave(&["--seed", "9", "gen", "--spec", spec]);
    let c = weave(&["--seed", "10", "gen", "--spec", spec]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    // Complete bipartite K_{3,3} minus one edge.
    let mut edges = Vec::new();
    for u in 0..3 {
        for v in 3..6 {
            if (u, v) != (0, 3) {
                edges.push([u, v]);
            }
        }
    }
    let doc = serde_json::json!({ "n": 6, "edges": edges, "parts": [[0, 1, 2], [3, 4, 5]] });
    std::fs::write(&g, doc.to_string()).unwrap();
    let gp = g.to_str().unwrap();

    let o = weave(&["check", "dense", "--in", gp, "--eps", "0.3", "--delta", "0.5"]);
    assert_eq!(code(&o), 2, "singleton pair 0,3 has density 0");
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "REFUTED");

    let o = weave(&["check", "dense", "--in", gp, "--eps", "0.6", "--delta", "0.5"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "CERTIFIED");

    let o = weave(&["check", "common", "--in", gp, "--d", "1", "--beta", "3"]);
    assert_eq!(code(&o), 2);
    let o = weave(&["check", "common", "--in", gp, "--d", "1", "--beta", "2"]);
    assert_eq!(code(&o), 0);

    let o = weave(&["check", "potential", "--in", gp, "--p", "1", "--d", "1", "--beta", "3"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    // Ordered pairs from part 0 with < 3 common neighbours: any pair containing 0.
    assert_eq!(v["value"], 5.0);

    let o = weave(&["check", "dense", "--in", gp, "--x", "part:7"]);
    assert_eq!(code(&o), 4);
}

#[test]
fn budget_flag_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let spec = r#"{"kind":"dense_rpartite_g","sizes":[12,12],"p":0.5}"#;
    assert_eq!(code(&weave(&["gen", "--spec", spec, "--out", g.to_str().unwrap()])), 0);
    let args = ["check", "potential", "--in", g.to_str().unwrap(), "--p", "2", "--d", "2", "--beta", "2"];
    assert_eq!(code(&weave(&args)), 0);
    let capped = Command::new(env!("CARGO_BIN_EXE_weave")).args(args).env("WEAVE_BUDGET", "100").output().unwrap();
    assert_eq!(code(&capped), 4, "12^4 tuples exceed a cap of 100");
    let flag_wins = Command::new(env!("CARGO_BIN_EXE_weave"))
        .args(["--budget", "1e6"])
        .args(args)
        .env("WEAVE_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(code(&flag_wins), 0);
}

#[test]
fn malformed_inputs_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(code(&weave(&["bench", "--spec", bad.to_str().unwrap()])), 4);
    assert_eq!(code(&weave(&["gen", "--spec", r#"{"kind":"no_such_generator"}"#])), 4);
    assert_eq!(code(&weave(&["relabel", "--in", "/nonexistent/h.json", "--d", "1", "--beta", "1"])), 4);
    let o = weave(&["gen", "--spec", r#"{"kind":"degenerate_bandwidth_h","n":10,"d":0,"beta":2,"r":2}"#]);
    assert_eq!(code(&o), 4);
}

#[test]
fn embed_bipartite_small() {
    let dir = tempfile::tempdir().unwrap();
    let (g, h, params, out) = (dir.path().join("g.json"), dir.path().join("h.json"), dir.path().join("p.json"), dir.path().join("f.json"));
    let gspec = r#"{"kind":"dense_rpartite_g","sizes":[120,120],"p":0.6}"#;
    let hspec = r#"{"kind":"degenerate_bandwidth_h","n":60,"d":2,"beta":4,"r":2}"#;
    assert_eq!(code(&weave(&["--seed", "1", "gen", "--spec", gspec, "--out", g.to_str().unwrap()])), 0);
    assert_eq!(code(&weave(&["--seed", "2", "gen", "--spec", hspec, "--out", h.to_str().unwrap()])), 0);
    let drc = serde_json::json!({
        "drc": {
            "s": 1, "lambda": 2.0, "beta": 4, "d": 2, "delta": 0.6, "eps": 0.0,
            "mode": { "kind": "objective", "candidates": 12 },
            "schedule": "practical", "seed": 0
        }
    });
    std::fs::write(&params, drc.to_string()).unwrap();
    let o = weave(&[
        "--seed",
        "5",
        "embed",
        "bipartite",
        "--g",
        g.to_str().unwrap(),
        "--h",
        h.to_str().unwrap(),
        "--params",
        params.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let f = read(&out);
    let map: Vec<u64> = f["map"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    assert_eq!(map.len(), 60);
    let hdoc = read(&h);
    let gdoc = read(&g);
    let gedges: std::collections::BTreeSet<(u64, u64)> =
        gdoc["edges"].as_array().unwrap().iter().map(|e| (e[0].as_u64().unwrap(), e[1].as_u64().unwrap())).collect();
    for e in hdoc["edges"].as_array().unwrap() {
        let (a, b) = (map[e[0].as_u64().unwrap() as usize], map[e[1].as_u64().unwrap() as usize]);
        assert!(gedges.contains(&(a.min(b), a.max(b))));
    }
}

#[test]
fn structures_patterns() {
    let o = weave(&["structures", "bkr", "--k", "3", "--r", "2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 6);
    // Two K_2 inside cliques plus K_{2,2} minus a matching between consecutive cliques.
    assert_eq!(v["edges"].as_array().unwrap().len(), 3 + 2 * 2);
    let o = weave(&["structures", "pkr", "--k", "5", "--r", "2"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["edges"].as_array().unwrap().len(), 4 + 3);
    assert_eq!(code(&weave(&["structures", "bkr", "--k", "3"])), 4);
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    let doc = serde_json::json!({
        "schema": "weave.experiment/1",
        "name": "relabel-small",
        "seed_start": 0,
        "seeds": 3,
        "pipeline": { "kind": "relabel", "n": 50, "d": 2, "beta": 3, "r": 2 }
    });
    std::fs::write(&spec, doc.to_string()).unwrap();
    let out = dir.path().join("out");
    let o = weave(&["bench", "--spec", spec.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read(&out.join("relabel-small-summary.json"));
    assert_eq!(summary["runs"], 3);
    assert_eq!(summary["successes"], 3);
    for s in 0..3 {
        assert!(out.join(format!("relabel-small-{s}.json")).exists());
    }
}
