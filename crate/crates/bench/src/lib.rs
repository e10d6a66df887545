//! Inputs shared by the benchmarks.

use equiload_core::verify::{gen_random_instance, random_start, GenParams};
use equiload_core::{Assignment, BipartiteInstance, Mode};

/// A weighted linear instance with `tasks × workers` candidate edges at density 1/2.
pub fn linear_instance(tasks: usize, workers: usize, seed: u64) -> BipartiteInstance {
    let mut p = GenParams::new(tasks, workers, seed);
    p.density = 0.5;
    p.weight_range = ["1/2".into(), "3".into()];
    p.weight_denominator = 2;
    gen_random_instance(&p).expect("benchmark parameters are satisfiable")
}

/// A connected general instance and an unequal starting point for it.
pub fn general_instance(tasks: usize, workers: usize, seed: u64) -> (BipartiteInstance, Assignment<f64>) {
    let mut p = GenParams::new(tasks, workers, seed);
    p.mode = Mode::GeneralReal;
    p.density = 0.5;
    p.demand_range = [-3, 3];
    p.weight_range = ["1/2".into(), "2".into()];
    p.weight_denominator = 4;
    p.depth = 3;
    let inst = gen_random_instance(&p).expect("benchmark parameters are satisfiable");
    let x0 = random_start(&inst, seed).expect("connected instance has a start");
    (inst, x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_are_usable() {
        let inst = linear_instance(4, 3, 1);
        assert_eq!(inst.num_tasks(), 4);
        let (g, x0) = general_instance(4, 3, 1);
        assert!(g.is_connected());
        assert_eq!(x0.len(), g.num_edges());
    }
}
