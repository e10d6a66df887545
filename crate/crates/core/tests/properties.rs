use std::collections::BTreeMap;

use equiload_core::expr::{g_map, invert_component};
use equiload_core::instance::check_membership;
use equiload_core::integral::enumerate_integral_with_cap;
use equiload_core::lp;
use equiload_core::numeric::{int, rat};
use equiload_core::tree::{bfs_tree, equalize_tree, fix_loads, fixed_point_bisect, RootedTreeView};
use equiload_core::verify::{
    check_improvement, improvement_step, interpolate_umax, random_fa_case, random_point_in_xa, GenParams, SplitMix64,
};
use equiload_core::{evaluate_loads, Assignment, BipartiteInstance, Mode, Rational};
use num_traits::Zero;
use proptest::prelude::*;

fn weighted(tasks: usize, workers: usize, seed: u64, density: f64) -> BipartiteInstance {
    let mut p = GenParams::new(tasks, workers, seed);
    p.density = density;
    p.max_edges = Some(9);
    p.weight_range = ["1/2".into(), "3".into()];
    p.weight_denominator = 2;
    equiload_core::verify::gen_random_instance(&p).unwrap()
}

fn small_unit(tasks: usize, workers: usize, seed: u64) -> BipartiteInstance {
    let mut p = GenParams::new(tasks, workers, seed);
    p.density = 0.5;
    p.max_edges = Some(7);
    p.demand_range = [0, 4];
    equiload_core::verify::gen_random_instance(&p).unwrap()
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fixing_recovers_the_point(seed in any::<u64>(), tasks in 1usize..=4, workers in 2usize..=4) {
        let inst = weighted(tasks, workers, seed, 0.7).with_mode(Mode::GeneralReal);
        prop_assume!(inst.is_connected() && inst.num_edges() > 0);
        let x = random_point_in_xa(&inst, &mut SplitMix64::new(seed));
        let loads = evaluate_loads(&inst, &x).unwrap();
        let root = inst.worker_ids().next().unwrap();
        let view = RootedTreeView::new(&inst, bfs_tree(&inst, root).unwrap(), root, x.clone()).unwrap();
        let targets: BTreeMap<_, _> = inst.worker_ids().map(|w| (w, loads.per_worker[w.0].clone())).collect();
        prop_assert_eq!(fix_loads(&view, &targets, 0.0).unwrap(), x);
    }

    #[test]
    fn raising_targets_lowers_the_root(seed in any::<u64>(), tasks in 1usize..=4, workers in 2usize..=4) {
        let inst = weighted(tasks, workers, seed, 0.7).with_mode(Mode::GeneralReal);
        prop_assume!(inst.is_connected() && inst.num_edges() > 0);
        let root = inst.worker_ids().next().unwrap();
        let view = RootedTreeView::new(&inst, bfs_tree(&inst, root).unwrap(), root, Assignment::zeros(&inst)).unwrap();
        let at = |level: Rational| {
            let targets: BTreeMap<_, _> = inst.worker_ids().map(|w| (w, level.clone())).collect();
            let x = fix_loads(&view, &targets, 0.0).unwrap();
            evaluate_loads(&inst, &x).unwrap().per_worker[root.0].clone()
        };
        prop_assert!(at(int(1)) <= at(int(0)));
    }

    #[test]
    fn equalization_is_root_independent(seed in any::<u64>(), tasks in 1usize..=4, workers in 2usize..=4) {
        let inst = weighted(tasks, workers, seed, 0.7).with_mode(Mode::GeneralReal);
        prop_assume!(inst.is_connected() && inst.num_edges() > 0);
        let x0 = random_point_in_xa(&inst, &mut SplitMix64::new(seed ^ 1));
        let tree = bfs_tree(&inst, inst.worker_ids().next().unwrap()).unwrap();
        let mut results = inst.worker_ids().map(|root| {
            let view = RootedTreeView::new(&inst, tree.clone(), root, x0.clone()).unwrap();
            equalize_tree(&view, 0.0).unwrap()
        });
        let (x, lambda) = results.next().unwrap();
        let loads = evaluate_loads(&inst, &x).unwrap();
        prop_assert!(loads.spread.is_zero());
        prop_assert_eq!(&loads.lmax, &lambda);
        let start = evaluate_loads(&inst, &x0).unwrap();
        if start.spread > Rational::zero() {
            prop_assert!(start.lmin < lambda && lambda < start.lmax);
        }
        for other in results {
            prop_assert_eq!(&other, &(x.clone(), lambda.clone()));
        }
    }

    #[test]
    fn interpolation_is_affine(seed in any::<u64>(), tasks in 1usize..=4, workers in 2usize..=4) {
        let inst = weighted(tasks, workers, seed, 0.6);
        let mut rng = SplitMix64::new(seed);
        let xbar = random_point_in_xa(&inst, &mut rng);
        let ystar = random_point_in_xa(&inst, &mut rng);
        let ts = [int(0), rat(1, 4), rat(1, 2), rat(3, 4), int(1)];
        let zs: Vec<_> = ts.iter().map(|t| interpolate_umax(&inst, &xbar, &ystar, t).unwrap()).collect();
        prop_assert_eq!(&zs[0], &xbar);
        for z in &zs {
            prop_assert!(check_membership(&inst, z, 0.0));
        }
        let loads: Vec<_> = zs.iter().map(|z| evaluate_loads(&inst, z).unwrap().per_worker).collect();
        let step: Vec<Rational> = loads[1].iter().zip(&loads[0]).map(|(b, a)| b - a).collect();
        for pair in loads.windows(2) {
            let diff: Vec<Rational> = pair[1].iter().zip(&pair[0]).map(|(b, a)| b - a).collect();
            prop_assert_eq!(&diff, &step);
        }
    }

    #[test]
    fn improvement_steps_are_valid(seed in any::<u64>(), tasks in 1usize..=5, workers in 2usize..=5) {
        let inst = weighted(tasks, workers, seed, 0.5);
        let x = random_point_in_xa(&inst, &mut SplitMix64::new(seed));
        if let Some(y) = improvement_step(&inst, &x).unwrap() {
            prop_assert!(check_improvement(&inst, &x, &y).holds());
            let changed = x.values().iter().zip(y.values()).filter(|(a, b)| a != b).count();
            prop_assert_eq!(changed, 2);
        }
    }

    #[test]
    fn integral_counts_and_bounds(seed in any::<u64>(), tasks in 1usize..=3, workers in 1usize..=3) {
        let inst = small_unit(tasks, workers, seed);
        let set = enumerate_integral_with_cap(&inst, 200_000).unwrap();
        let expected: u128 = inst
            .task_ids()
            .map(|u| {
                let d: u128 = inst.demand(u).to_integer().try_into().unwrap();
                let k = inst.task_edges(u).len() as u128;
                binomial(d + k - 1, k - 1)
            })
            .product();
        prop_assert_eq!(set.count(), expected);

        let points: Vec<_> = set.iter().collect();
        prop_assert_eq!(points.len() as u128, expected);
        let reports: Vec<_> = points.iter().map(|x| evaluate_loads(&inst, x).unwrap()).collect();
        let summary = set.summary().unwrap();
        prop_assert_eq!(&summary.min_lmax, reports.iter().map(|r| &r.lmax).min().unwrap());
        prop_assert_eq!(&summary.max_lmin, reports.iter().map(|r| &r.lmin).max().unwrap());
        prop_assert_eq!(&summary.min_spread, reports.iter().map(|r| &r.spread).min().unwrap());
        let argmin = set.min_lmax().unwrap();
        let hits = reports.iter().filter(|r| r.lmax == summary.min_lmax).count();
        prop_assert_eq!(argmin.argmin_count as usize, hits);

        // the integer points sit inside the relaxation
        prop_assert!(lp::solve_min_lmax(&inst).unwrap().optimal_value() <= &summary.min_lmax);
        prop_assert!(lp::solve_max_lmin(&inst).unwrap().optimal_value() >= &summary.max_lmin);
        prop_assert!(lp::solve_min_spread(&inst).unwrap().optimal_value() <= &summary.min_spread);
    }

    #[test]
    fn unit_weights_conserve_work(seed in any::<u64>(), tasks in 1usize..=5, workers in 1usize..=5) {
        let inst = small_unit(tasks, workers, seed);
        let x = random_point_in_xa(&inst, &mut SplitMix64::new(seed));
        let total: Rational = evaluate_loads(&inst, &x).unwrap().per_worker.into_iter().sum();
        let demand: Rational = inst.tasks().iter().map(|t| t.demand.clone()).sum();
        prop_assert_eq!(total, demand);
    }

    #[test]
    fn inversion_round_trips(seed in any::<u64>(), target in -20.0f64..20.0) {
        let (expr, point, free) = random_fa_case(seed);
        let s = invert_component(&expr, &point, free, &target, 0.0).unwrap();
        let mut p = point.clone();
        p[free.0] = s;
        let v: f64 = expr.eval(&p).unwrap();
        prop_assert!((v - target).abs() <= 1e-10, "{v} vs {target}");
    }

    #[test]
    fn g_is_decreasing(seed in any::<u64>(), level in -5.0f64..5.0) {
        let (expr, point, _) = random_fa_case(seed);
        prop_assume!(point.len() >= 2);
        let edges: Vec<_> = expr.edges().into_iter().collect();
        let (a, b) = (edges[0], edges[1]);
        let g = g_map(&expr, &point, a, b, level, 0.0).unwrap();
        let values: Vec<f64> = (0..=12).map(|i| g(-3.0 + 0.5 * i as f64).unwrap()).collect();
        prop_assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
    }

    #[test]
    fn affine_fixed_points(a in -50.0f64..50.0, b in 0.0f64..10.0) {
        let l = fixed_point_bisect(|l| a - b * l, 1e-9).unwrap();
        prop_assert!((l - a / (1.0 + b)).abs() <= 1e-8);
    }
}
