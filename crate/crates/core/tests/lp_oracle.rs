mod common;

use common::oracle::{vertex_value, Program};
use equiload_core::fixtures;
use equiload_core::lp::{solve_max_lmin, solve_min_lmax, solve_min_spread};
use equiload_core::numeric::{int, rat};
use equiload_core::verify::{gen_random_instance, GenParams};
use proptest::prelude::*;

#[test]
fn fixtures_match_vertex_enumeration() {
    let fig1 = fixtures::fig1();
    assert_eq!(vertex_value(&fig1, Program::MinLmax), Some(rat(161, 13)));
    assert_eq!(vertex_value(&fig1, Program::MaxLmin), Some(int(20)));
    assert_eq!(vertex_value(&fig1, Program::MinSpread), Some(int(0)));
    let fig2 = fixtures::fig2();
    assert_eq!(vertex_value(&fig2, Program::MinLmax), Some(rat(455, 51)));
    assert_eq!(vertex_value(&fig2, Program::MaxLmin), Some(rat(91000, 201)));
    assert_eq!(vertex_value(&fig2, Program::MinSpread), Some(int(0)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn simplex_matches_vertex_enumeration(seed in 0u64..1_000_000, tasks in 1usize..=3, workers in 1usize..=3) {
        let mut p = GenParams::new(tasks, workers, seed);
        p.density = 0.6;
        p.max_edges = Some(7);
        p.weight_range = ["1/3".into(), "2".into()];
        p.weight_denominator = 3;
        let inst = gen_random_instance(&p).unwrap();
        prop_assert_eq!(solve_min_lmax(&inst).unwrap().value, vertex_value(&inst, Program::MinLmax));
        prop_assert_eq!(solve_max_lmin(&inst).unwrap().value, vertex_value(&inst, Program::MaxLmin));
        prop_assert_eq!(solve_min_spread(&inst).unwrap().value, vertex_value(&inst, Program::MinSpread));
    }
}
