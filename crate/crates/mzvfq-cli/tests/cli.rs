use std::path::PathBuf;
use std::process::{Command, Output};

use mzvfq::decomp::TripleJson;
use serde_json::Value;

fn run_with(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mzvfq"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("MZVFQ_THREADS", t),
        None => cmd.env_remove("MZVFQ_THREADS"),
    };
    cmd.output().expect("the binary runs")
}

fn run(args: &[&str]) -> Output {
    run_with(args, None)
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("mzvfq-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn examples_suite_reproduces_the_worked_coproducts() {
    let out = run(&["verify", "--suite", "examples", "--q", "2"]);
    assert_eq!(code(&out), 0);
    let report = json_of(&out);
    assert_eq!(report["passed"], true);
    assert_eq!(report["failed"], 0);
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"(1,3) G_s rho_t"));
    assert!(names.contains(&"(1,1,2) G_s v"));
    assert!(names.contains(&"(1,3) G_2 [t]v"));
}

#[test]
fn one_three_coproduct_action_is_the_six_by_six_matrix() {
    let out = run(&["tmodule", "--q", "2", "--index", "1,3", "--emit", "rho_t"]);
    assert_eq!(code(&out), 0);
    let rho = &json_of(&out)["module"]["rho_t"];
    let rows = rho.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let term = |r: usize, c: usize| -> Vec<(u64, String)> {
        rho[r - 1][c - 1]
            .as_array()
            .unwrap()
            .iter()
            .map(|t| (t["tau_deg"].as_u64().unwrap(), t["poly"].as_str().unwrap().to_string()))
            .collect()
    };
    assert_eq!(term(4, 1), vec![(1, "1".to_string())]);
    assert_eq!(term(4, 5), vec![(1, "theta^2".to_string())]);
    assert_eq!(term(4, 6), vec![(1, "1".to_string())]);
    assert_eq!(term(6, 6), vec![(0, "theta".to_string()), (1, "1".to_string())]);
    assert!(term(5, 6).is_empty());
}

#[test]
fn goss_vanishing_is_reported_as_zero_to_precision() {
    let out = run(&["zeta", "--q", "3", "--index", "2", "--place", "v", "--v-poly", "theta", "--prec", "8"]);
    assert_eq!(code(&out), 0);
    let result = &json_of(&out)["result"];
    assert_eq!(result["zero_to_precision"], true);
    assert_eq!(result["value"]["abs_prec"], 8);
}

#[test]
fn zeta_at_infinity_agrees_between_direct_and_bundle_routes() {
    let direct = run(&["zeta", "--q", "2", "--index", "1,3", "--prec", "30"]);
    let bundle = run(&["zeta", "--q", "2", "--index", "1,3", "--prec", "30", "--via", "bundle"]);
    let triples = run(&["zeta", "--q", "2", "--index", "1,3", "--prec", "30", "--via", "triples"]);
    assert_eq!(code(&direct), 0);
    let d = json_of(&direct)["result"]["value"].clone();
    assert_eq!(d["prec"], 30);
    assert_eq!(d, json_of(&bundle)["result"]["value"]);
    assert_eq!(d, json_of(&triples)["result"]["value"]);
}

#[test]
fn verify_chang_at_q3_passes() {
    let out = run(&["verify", "--suite", "chang", "--q", "3", "--weight-max", "5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["passed"], true);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["verify", "--suite", "nonsense", "--q", "2"],
        vec!["zeta", "--q", "2", "--index", "1,x"],
        vec!["zeta", "--q", "2", "--index", "1,3", "--place", "v"],
        vec!["zeta", "--q", "2", "--index", "2", "--place", "v", "--v-poly", "theta^2 + 1"],
        vec!["zeta", "--q", "6", "--index", "2"],
        vec!["zeta", "--q", "2", "--index", "2", "--place", "v", "--v-poly", "theta", "--via", "direct"],
    ] {
        let out = run(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run_with(&["special", "--q", "2", "--what", "D", "--n", "2"], Some("zero"));
    assert_eq!(code(&out), 2);
}

#[test]
fn output_does_not_depend_on_the_thread_count() {
    let args = ["verify", "--suite", "logli", "--q", "3", "--weight-max", "4"];
    let one = run_with(&args, Some("1"));
    let four = run_with(&args, Some("4"));
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn relation_files_are_checked_at_both_places() {
    let holds = scratch_file("holds.json", r#"{"terms": [["1", [3]], ["theta^2 + theta", [1, 2]]]}"#);
    let fails = scratch_file("fails.json", r#"{"terms": [["1", [3]], ["1", [1, 2]]]}"#);
    let base = ["relation", "--q", "2", "--weight", "3", "--place", "v", "--v-poly", "theta + 1", "--coeffs"];
    let ok = run(&[&base[..], &[holds.to_str().unwrap()]].concat());
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    assert_eq!(json_of(&ok)["report"]["v_residual"], Value::Null);
    let bad = run(&[&base[..], &[fails.to_str().unwrap()]].concat());
    assert_eq!(code(&bad), 1);
    let wrong_weight = run(&["relation", "--q", "2", "--weight", "4", "--place", "v", "--v-poly", "theta", "--coeffs", holds.to_str().unwrap()]);
    assert_eq!(code(&wrong_weight), 2);
    let _ = std::fs::remove_file(holds);
    let _ = std::fs::remove_file(fails);
}

#[test]
fn triples_json_round_trips() {
    let out = run(&["triples", "--q", "2", "--index", "1,3"]);
    assert_eq!(code(&out), 0);
    let report = json_of(&out);
    let triples: Vec<TripleJson> = serde_json::from_value(report["triples"].clone()).unwrap();
    assert_eq!(triples.len(), 4);
    assert_eq!(triples[1], TripleJson { b: vec![0, 1], s: vec![4], u: vec![vec![1]] });
    assert_eq!(serde_json::to_value(&triples).unwrap(), report["triples"]);
}

#[test]
fn coproduct_zeta_vector_passes_its_checks() {
    let out = run(&["coproduct", "--q", "3", "--index", "1,2", "--emit", "zeta-vector", "--prec", "15"]);
    assert_eq!(code(&out), 0);
    let body = &json_of(&out)["coproduct"];
    assert_eq!(body["passed"], true);
    assert_eq!(body["report"]["coordinate_residual"], Value::Null);
}
