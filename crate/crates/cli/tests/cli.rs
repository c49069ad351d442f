use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn arproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arproj")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn construct(dir: &Path, which: &str, n: &str) -> PathBuf {
    let path = dir.join(format!("{which}-{n}.json"));
    let out = arproj(&["construct", which, "--n", n, "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    path
}

#[test]
fn construct_reports_slice_sizes() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("e1.json");
    let r = json(&arproj(&["construct", "example1", "--n", "2", "--out", path.to_str().unwrap(), "--output", "json"]));
    assert_eq!(r["sizes"]["A"], 9);
    assert_eq!(r["sizes"]["G"], 36);
    assert_eq!(r["M"], 7);
    assert_eq!(r["exponent"], 1.63093);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["G"].as_array().unwrap().len(), 36);

    let r = json(&arproj(&["construct", "example2", "--n", "1", "--output", "json"]));
    assert_eq!(r["sizes"]["C"], 4);
    assert_eq!(r["sizes"]["D"], 4);
    assert_eq!(r["instance"]["A"].as_array().unwrap().len(), 4);
}

#[test]
fn construct_from_pattern_file() {
    let dir = TempDir::new().unwrap();
    let pattern = dir.path().join("single.json");
    std::fs::write(&pattern, r#"{"pairs": [[0, 0]]}"#).unwrap();
    let r = json(&arproj(&["construct", "pattern-file", pattern.to_str().unwrap(), "--output", "json"]));
    assert_eq!(r["sizes"]["G"], 1);
    assert_eq!(r["instance"]["G"], serde_json::json!([[0, 0]]));
    assert!(r["exponent"].is_null());

    std::fs::write(&pattern, r#"{"pairs": [[0, 0]"#).unwrap();
    assert_eq!(code(&arproj(&["construct", "pattern-file", pattern.to_str().unwrap()])), 2);
    assert_eq!(code(&arproj(&["construct", "pattern-file"])), 2);
}

#[test]
fn construct_errors_have_codes() {
    assert_eq!(code(&arproj(&["construct", "example1", "--M", "6"])), 2);
    assert_eq!(code(&arproj(&["construct", "example1", "--n", "6", "--cap", "10"])), 4);
    assert_eq!(code(&arproj(&["construct", "example3"])), 2);
}

#[test]
fn verify_examples() {
    let dir = TempDir::new().unwrap();
    let e1 = construct(dir.path(), "example1", "1");
    let e2 = construct(dir.path(), "example2", "1");

    let r = json(&arproj(&["verify", e1.to_str().unwrap(), "--N", "3", "--chain", "6", "--output", "json"]));
    assert_eq!(r.as_array().unwrap().len(), 1);
    assert_eq!(r[0]["N"], 3);
    assert!(r[0]["inequalities"].as_array().unwrap().iter().all(|i| i["holds"] == true));

    let r = json(&arproj(&["verify", e2.to_str().unwrap(), "--N", "4", "--chain", "both", "--output", "json"]));
    let chains: Vec<&Value> = r.as_array().unwrap().iter().map(|c| &c["chain"]).collect();
    assert_eq!(chains, [6, 4]);

    let out = arproj(&["verify", e1.to_str().unwrap(), "--N", "2"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("#A = 3"));
}

#[test]
fn verify_auto_budget_is_echoed() {
    let dir = TempDir::new().unwrap();
    let e2 = construct(dir.path(), "example2", "2");
    let out = arproj(&["verify", e2.to_str().unwrap(), "--output", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "chain,N,name,relation,lhs,rhs,slack,verdict");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| r.starts_with("6,16,") || r.starts_with("4,16,")));
    assert!(rows.iter().all(|r| r.ends_with(",PASS")));
}

#[test]
fn verify_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"group": "Z", "A": [0], "B": [0], "G": [[0, 1]]}"#).unwrap();
    assert_eq!(code(&arproj(&["verify", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&arproj(&["verify", "/nonexistent.json"])), 2);
    assert_eq!(code(&arproj(&["verify", bad.to_str().unwrap(), "--N", "zero"])), 2);
}

#[test]
fn lemma_on_the_first_construction() {
    let dir = TempDir::new().unwrap();
    let e1 = construct(dir.path(), "example1", "1");
    let r = json(&arproj(&["lemma", "--from-instance", e1.to_str().unwrap(), "--output", "json"]));
    assert_eq!(r["dp_count"], 12);
    assert_eq!(r["naive_count"], 12);
    assert_eq!(r["lower_bound"], serde_json::json!({"num": 12, "den": 1}));
    assert_eq!(r["slack"]["num"], 0);
    assert_eq!(r["holds"], true);
}

#[test]
fn lemma_problem_files() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("p.json");
    std::fs::write(&path, r#"{"size": 5, "labelings": []}"#).unwrap();
    let r = json(&arproj(&["lemma", path.to_str().unwrap(), "--output", "json"]));
    assert_eq!(r["dp_count"], 5);
    assert_eq!(r["lower_bound"]["num"], 5);

    std::fs::write(&path, r#"{"size": 40, "labelings": [{"labels": [0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1], "label_count": 2}]}"#)
        .unwrap();
    let out = arproj(&["lemma", path.to_str().unwrap(), "--cap", "100"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("naive count   skipped"));
    assert!(text.contains("chain count   1522"));

    std::fs::write(&path, r#"{"size": 2, "labelings": [{"labels": [0, 3], "label_count": 2}]}"#).unwrap();
    assert_eq!(code(&arproj(&["lemma", path.to_str().unwrap()])), 2);
    assert_eq!(code(&arproj(&["lemma"])), 2);
}

#[test]
fn lemma_random_suite() {
    let out = arproj(&["lemma", "--random", "1000", "--seed", "0"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("1000/1000 PASS"));
    let r = json(&arproj(&["lemma", "--random", "200", "--seed", "9", "--output", "json"]));
    assert_eq!(r["passed"], 200);
    assert_eq!(r["failures"], serde_json::json!([]));
}

#[test]
fn search_examples() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("k3.json");
    let r = json(&arproj(&["search", "--K", "3", "--out", out_path.to_str().unwrap(), "--output", "json"]));
    assert!(r["best_exponent"].as_f64().unwrap() >= 1.630930 - 1e-6);
    assert_eq!(r["exhaustive"], true);
    let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["best_exponent", "exhaustive", "nodes", "witnesses"]);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(written, r);

    let r = json(&arproj(&["search", "--K", "4", "--constrain-d", "--output", "json"]));
    assert!(r["best_exponent"].as_f64().unwrap() >= 1.5 - 1e-9);

    let r = json(&arproj(&["search", "--K", "0", "--output", "json"]));
    assert_eq!(r["best_exponent"], 0.0);
    assert_eq!(r["witnesses"], serde_json::json!([]));
}

#[test]
fn search_budget_and_usage_codes() {
    let out = arproj(&["search", "--K", "4", "--node-budget", "10", "--output", "json"]);
    assert_eq!(code(&out), 4);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["exhaustive"], false);
    assert_eq!(code(&arproj(&["search", "--K", "5", "--mode", "exhaustive"])), 2);
    assert_eq!(code(&arproj(&["search", "--K", "9"])), 2);
    assert_eq!(code(&arproj(&["search"])), 2);
}

#[test]
fn search_output_is_byte_stable() {
    let run = |workers: &str| arproj(&["search", "--K", "5", "--output", "json", "--workers", workers]).stdout;
    let first = run("1");
    assert_eq!(first, run("1"));
    assert_eq!(first, run("4"));
}

#[test]
fn dimensions_table() {
    let r = json(&arproj(&["dimensions", "--n-min", "2", "--n-max", "13", "--output", "json"]));
    assert_eq!(r["novelty_from"]["minkowski"], 9);
    assert_eq!(r["novelty_from"]["hausdorff"], 13);
    let rows = r["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0]["minkowski"], "11/7");
    assert_eq!(rows[0]["wolff"], "2");
    assert_eq!(rows[0]["best_minkowski"], "wolff");
    assert_eq!(rows[6]["n"], 8);
    assert_eq!(rows[6]["minkowski"], "5");
    assert_eq!(rows[6]["best_minkowski"], "equal");
    let first_new = rows.iter().find(|r| r["best_minkowski"] == "new").unwrap();
    assert_eq!(first_new["n"], 9);

    let out = arproj(&["dimensions", "--n-min", "8", "--n-max", "9", "--output", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text,
        "n,minkowski,hausdorff,wolff,best_minkowski,best_hausdorff\n8,5,53/11,5,equal,wolff\n9,39/7,59/11,11/2,new,wolff\n"
    );
    assert_eq!(code(&arproj(&["dimensions", "--n-min", "1"])), 2);
    assert_eq!(code(&arproj(&["dimensions", "--n-min", "5", "--n-max", "4"])), 2);
}
