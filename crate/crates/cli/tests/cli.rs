use std::path::PathBuf;

use equiload_core::fixtures;
use equiload_core::io::{parse_assignment, parse_instance, AnyAssignment};
use equiload_core::verify::TheoremReport;
use serde_json::Value;

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = equiload_cli::run(std::iter::once("equiload").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, _) = run(args);
    (code, serde_json::from_str(&out).unwrap())
}

fn temp_file(name: &str, text: &str) -> String {
    let path = std::env::temp_dir().join(format!("equiload-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn output_is_byte_identical_across_runs() {
    let f = fixture("fig2.json");
    for args in [
        ["solve", "--objective", "min-max", &f].as_slice(),
        ["enumerate", "--pareto", &f].as_slice(),
        ["validate", &f].as_slice(),
    ] {
        assert_eq!(run(args).1, run(args).1);
    }
    let first = run(&["verify", "--theorem", "thm2", "--seeds", "1..8"]);
    let second = run(&["verify", "--theorem", "thm2", "--seeds", "1..8"]);
    assert_eq!(first.1, second.1);
}

#[test]
fn meta_goes_to_stderr_only() {
    let plain = run(&["solve", "--objective", "min-spread", &fixture("fig1.json")]);
    let meta = run(&["solve", "--objective", "min-spread", "--meta", &fixture("fig1.json")]);
    assert_eq!(plain.1, meta.1);
    assert!(plain.2.is_empty());
    assert!(meta.2.contains("elapsed_ms"));
}

#[test]
fn solve_outputs_round_trip() {
    let inst = fixtures::fig1();
    for objective in ["min-max", "max-min", "min-spread", "equal-feas"] {
        let (code, v) = json(&["solve", "--objective", objective, &fixture("fig1.json")]);
        assert_eq!(code, 0);
        assert_eq!(v["status"], "OPTIMAL");
        let parsed = parse_assignment(&inst, &v["assignment"].to_string()).unwrap();
        assert!(matches!(parsed, AnyAssignment::Exact(_)));
    }
    let (_, v) = json(&["solve", "--objective", "max-min", &fixture("fig2.json")]);
    assert_eq!(v["value"], "91000/201");
}

#[test]
fn equal_feas_infeasible_is_an_answer() {
    let inst = r#"{"mode": "LINEAR_NONNEG", "tasks": [{"id": "u", "demand": "3"}],
        "workers": ["a", "b"], "edges": [{"task": "u", "worker": "a"}]}"#;
    let path = temp_file("single.json", inst);
    let (code, v) = json(&["solve", "--objective", "equal-feas", &path]);
    assert_eq!((code, v["status"].as_str()), (0, Some("INFEASIBLE")));
    let (code, v) = json(&["solve", "--objective", "min-spread", &path]);
    assert_eq!((code, v["value"].as_str()), (0, Some("3")));
}

#[test]
fn equalize_fig3() {
    let start = temp_file("x0.json", r#"{"values": {"u1:w1": "1", "u1:w2": "0", "u2:w1": "1", "u2:w2": "0"}}"#);
    let (code, v) = json(&["equalize", "--start", &start, &fixture("fig3.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["lambda"], "1/2");
    assert_eq!(v["start"]["lmax"], "3/2");
    assert_eq!(v["loads"]["spread"], "0");

    let (code, given) = json(&[
        "equalize",
        "--start",
        &start,
        "--tree",
        "given",
        "--tree-edges",
        "u1:w1,u1:w2,u2:w2",
        &fixture("fig3.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(given["lambda"], "1/2");
    assert_eq!(given["tree"], serde_json::json!(["u1:w1", "u1:w2", "u2:w2"]));

    let (code, _, err) = run(&["equalize", "--tree", "given", &fixture("fig3.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("--tree-edges"));
}

#[test]
fn enumerate_fig2_summary_and_dump() {
    let (code, v) = json(&["enumerate", &fixture("fig2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["min_lmax"], "9");
    assert_eq!(v["argmin_count"], 9);
    assert!(v.get("pareto").is_none());

    let (code, out, _) = run(&["enumerate", "--dump", &fixture("fig2.json")]);
    assert_eq!(code, 0);
    let inst = fixtures::fig2();
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3630);
    assert!(lines.iter().all(|l| parse_assignment(&inst, l).is_ok()));

    let (code, _, err) = run(&["enumerate", "--cap", "100", &fixture("fig2.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("3630"));
}

#[test]
fn verify_reports_parse_back() {
    let (code, v) = json(&["verify", "--theorem", "thm1", "--seeds", "1..10"]);
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["total"], 10);
    let reports: Vec<TheoremReport> = serde_json::from_value(v["reports"].clone()).unwrap();
    assert_eq!(reports.len(), 10);

    let (code, v) = json(&["verify", "--theorem", "thm1", &fixture("fig1.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["reports"][0]["verdict"], "HYPOTHESIS_VOID");
    let (code, v) = json(&["verify", "--theorem", "prop1", "--seeds", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["reports"][0]["seed"], 5);
}

#[test]
fn gen_writes_a_parseable_instance() {
    let params =
        temp_file("params.json", r#"{"tasks": 3, "workers": 2, "mode": "GENERAL_REAL", "depth": 3, "seed": 9}"#);
    let (code, out, _) = run(&["gen", "--params", &params]);
    assert_eq!(code, 0);
    let inst = parse_instance(&out).unwrap();
    assert!(inst.is_connected());
    let (_, again, _) = run(&["gen", "--params", &params, "--seed", "9"]);
    assert_eq!(out, again);

    let out_path = temp_file("out.json", "");
    assert_eq!(run(&["gen", "--params", &params, "--output", &out_path]).0, 0);
    assert_eq!(std::fs::read_to_string(out_path).unwrap(), out);
}

#[test]
fn parse_and_usage_errors_exit_2() {
    let garbage = temp_file("garbage.json", "{\n  \"mode\": LINEAR\n}");
    let (code, _, err) = run(&["validate", &garbage]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");

    let (code, _, err) = run(&["solve", "--objective", "min-max", "--objective", "max-min", &fixture("fig1.json")]);
    assert_eq!(code, 2);
    assert!(err.contains("--objective"), "{err}");

    let (code, _, err) = run(&["verify", "--theorem", "thm1", "--seeds", "9..3"]);
    assert_eq!(code, 2);
    assert!(err.contains("--seeds"), "{err}");

    let (code, _, _) = run(&["validate", "/nonexistent/instance.json"]);
    assert_eq!(code, 2);
}

#[test]
fn validate_summarizes_the_instance() {
    let (code, v) = json(&["validate", &fixture("fig1.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["valid"], true);
    assert_eq!(v["edges"], 6);
}
