use equiload_core::fixtures;
use equiload_core::io::{instance_to_json, parse_instance};
use equiload_core::verify::{gen_random_instance, GenParams};
use serde_json::Value;

fn golden(name: &str) -> Value {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn generated(tasks: usize, workers: usize, density: f64, seed: u64) -> Value {
    let mut p = GenParams::new(tasks, workers, seed);
    p.density = density;
    instance_to_json(&gen_random_instance(&p).unwrap())
}

#[test]
fn complete_two_by_three() {
    let g = golden("gen_2x3_seed1.json");
    assert_eq!(generated(2, 3, 1.0, 1), g);
    assert_eq!(g["edges"].as_array().unwrap().len(), 6);
    let demands: Vec<&str> = g["tasks"].as_array().unwrap().iter().map(|t| t["demand"].as_str().unwrap()).collect();
    assert_eq!(demands, ["6", "8"]);
}

#[test]
fn seeds_one_and_two_differ() {
    let a = golden("gen_3x4_half_seed1.json");
    let b = golden("gen_3x4_half_seed2.json");
    assert_eq!(generated(3, 4, 0.5, 1), a);
    assert_eq!(generated(3, 4, 0.5, 2), b);
    assert_ne!(a["edges"], b["edges"]);
}

#[test]
fn goldens_parse_back() {
    for name in ["gen_2x3_seed1.json", "gen_3x4_half_seed1.json", "gen_3x4_half_seed2.json"] {
        let g = golden(name);
        let inst = parse_instance(&g.to_string()).unwrap();
        assert_eq!(instance_to_json(&inst), g);
    }
}

#[test]
fn fixture_files_are_canonical() {
    for (text, inst) in [
        (fixtures::FIG1_JSON, fixtures::fig1()),
        (fixtures::FIG2_JSON, fixtures::fig2()),
        (fixtures::FIG3_JSON, fixtures::fig3()),
    ] {
        let raw: Value = serde_json::from_str(text).unwrap();
        assert_eq!(instance_to_json(&inst), raw);
    }
}
