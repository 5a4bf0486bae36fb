use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn plumbtw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plumbtw")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_doc(name: &str, text: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn feasibility_of_two_middle_classes() {
    let out = plumbtw(&["feasibility", "--n", "4", "--betti", "1,0,2,0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["outputs"]["feasible"], false);
    assert_eq!(r["outputs"]["beta"], 2);
}

#[test]
fn feasibility_length_must_match_n() {
    let out = plumbtw(&["feasibility", "--n", "3", "--betti", "1,0,1,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["reason"], "usage");
}

#[test]
fn equiv_core_against_its_shift() {
    let out = plumbtw(&["equiv", "--a", "Q0", "--b", "Q0[1]"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["outputs"]["verdict"], "no");
}

#[test]
fn normalize_braid_output() {
    let out = plumbtw(&["--n", "4", "braid", "--word", "s0 s1 S0 s1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = report(&out)["outputs"]["complex"].to_string();
    let path = write_doc("orbit.json", &doc);
    let out = plumbtw(&["normalize", "--in", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let cert = &report(&out)["outputs"]["certificate"];
    assert_eq!(cert["multiplicity"], 1);
    assert!(!cert["word"].as_str().unwrap().is_empty());
}

#[test]
fn inadmissible_input_is_a_mathematical_rejection() {
    let path = write_doc(
        "inadmissible.json",
        r#"{"n":3,"char":32003,"summands":[{"vertex":0,"position":0},{"vertex":0,"position":-1}],"differential":[]}"#,
    );
    let out = plumbtw(&["normalize", "--in", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["reason"], "not-admissible");
}

#[test]
fn maurer_cartan_violation_names_slot() {
    let path = write_doc(
        "obstructed.json",
        r#"{"n":3,"char":0,
            "summands":[{"vertex":1,"position":1},{"vertex":0,"position":0},{"vertex":1,"position":0}],
            "differential":[{"from":0,"to":1,"basis":"q","coeff":"1"},{"from":1,"to":2,"basis":"p","coeff":"1"}]}"#,
    );
    let out = plumbtw(&["validate", "--in", &path]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["reason"], "invalid-complex");
    assert!(r["message"].as_str().unwrap().contains("(V_1 -> V_0)"));
}

#[test]
fn flags_must_agree_with_documents() {
    let path = write_doc("n4.json", r#"{"n":4,"char":0,"summands":[{"vertex":0,"position":0}]}"#);
    let out = plumbtw(&["--n", "5", "validate", "--in", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(plumbtw(&["validate", "--in", &path]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_two() {
    let out = plumbtw(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["reason"], "usage");
    let out = plumbtw(&["hf", "--a", "missing.json", "--b", "Q1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["reason"], "io");
}

#[test]
fn reports_are_deterministic() {
    let args = ["--n", "3", "braid", "--word", "s1 s0 s1", "--in", "Q1[2]"];
    let a = plumbtw(&args);
    let b = plumbtw(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(report(&a).get("wall_time_ms").is_none());
    assert!(report(&plumbtw(&["--timing", "hf", "--a", "Q0", "--b", "Q1"])).get("wall_time_ms").is_some());
}

#[test]
fn rank_table_is_csv() {
    let out = plumbtw(&["rank-table", "--k", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,total_rank,ranks");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1,1,"));
}

#[test]
fn cover_pipeline() {
    // S at 0 -p-> Σ at 0 -f1-> Σ at -2, n = 3, over F_2 with a double cover
    let path = write_doc(
        "impossible.json",
        r#"{"n":3,"char":2,
            "summands":[{"vertex":0,"position":0},{"vertex":1,"position":0},{"vertex":1,"position":-2}],
            "differential":[{"from":0,"to":1,"basis":"p","coeff":"1"},{"from":1,"to":2,"basis":"f1","coeff":"1"}]}"#,
    );
    let out = plumbtw(&["specialize", "--in", &path, "--vertex", "1", "--index", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let spec = write_doc("specialized.json", &report(&out)["outputs"]["complex"].to_string());
    let out = plumbtw(&["decompose", "--in", &spec]);
    assert_eq!(report(&out)["outputs"]["count"], 2);
    let out = plumbtw(&["specialize", "--in", &path, "--vertex", "1", "--index", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["reason"], "cover-characteristic");
    let out = plumbtw(&["fibre-rank", "--in", &spec, "--vertex", "0"]);
    assert_eq!(report(&out)["outputs"]["total_rank"], 1);
}

#[test]
fn orbit_witness_and_grading() {
    let out = plumbtw(&["orbit-witness"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&plumbtw(&["--n", "5", "hf", "--a", "Q1", "--b", "Q1"]));
    assert_eq!(r["outputs"]["ranks"]["0"], 1);
    assert_eq!(r["outputs"]["ranks"]["5"], 1);
}
