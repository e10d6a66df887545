use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use equiload_bench::{general_instance, linear_instance};
use equiload_core::fixtures;
use equiload_core::integral::enumerate_integral;
use equiload_core::lp::{solve_min_lmax, solve_min_spread};
use equiload_core::tree::{equalize_connected, TreePolicy};
use equiload_core::verify::{run_seed, TheoremKind, GENERAL_TOL};

fn lp(c: &mut Criterion) {
    let mut g = c.benchmark_group("lp");
    g.bench_function("fig1 min lmax", |b| {
        let inst = fixtures::fig1();
        b.iter(|| solve_min_lmax(black_box(&inst)).unwrap())
    });
    for n in [4, 8, 12] {
        let inst = linear_instance(n, n, 7);
        g.bench_with_input(BenchmarkId::new("min spread", n), &inst, |b, inst| {
            b.iter(|| solve_min_spread(black_box(inst)).unwrap())
        });
    }
    g.finish();
}

fn enumeration(c: &mut Criterion) {
    let inst = fixtures::fig2();
    c.bench_function("fig2 integral summary", |b| {
        b.iter(|| enumerate_integral(black_box(&inst)).unwrap().summary().unwrap())
    });
}

fn equalization(c: &mut Criterion) {
    let mut g = c.benchmark_group("equalize");
    g.bench_function("fig3 exact", |b| {
        let inst = fixtures::fig3();
        let x0 = equiload_core::Assignment::new([1, 0, 1, 0].map(equiload_core::numeric::int).to_vec());
        b.iter(|| equalize_connected(black_box(&inst), &x0, &TreePolicy::Bfs, GENERAL_TOL).unwrap())
    });
    for n in [3, 5, 8] {
        let (inst, x0) = general_instance(n, n, 3);
        g.bench_with_input(BenchmarkId::new("general", n), &(inst, x0), |b, (inst, x0)| {
            b.iter(|| equalize_connected(black_box(inst), x0, &TreePolicy::Bfs, GENERAL_TOL).unwrap())
        });
    }
    g.finish();
}

fn theorem_checks(c: &mut Criterion) {
    let mut g = c.benchmark_group("theorem check");
    g.sample_size(20);
    g.bench_function("thm1 seed 3", |b| b.iter(|| run_seed(TheoremKind::Thm1, black_box(3)).unwrap()));
    g.bench_function("thm2 seed 3", |b| b.iter(|| run_seed(TheoremKind::Thm2, black_box(3)).unwrap()));
    g.finish();
}

criterion_group!(benches, lp, enumeration, equalization, theorem_checks);
criterion_main!(benches);
