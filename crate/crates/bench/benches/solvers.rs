use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use neurolasso::{
    fista_solve, ista_solve, project, rhs, sign_pattern_oracle, soft_threshold, solve,
    BaselineConfig, BoxSet, DVector, GramMode, SolverConfig, StepRule,
};
use neurolasso_bench::instance;

fn bench_rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("rhs");
    for (n, l) in [(64, 256), (256, 1024)] {
        for mode in [GramMode::Dense, GramMode::MatrixFree] {
            let (inst, cache) = instance(n, l, 1, mode);
            let x = DVector::from_fn(l, |i, _| ((i % 7) as f64 - 3.0) * 0.01);
            group.bench_with_input(
                BenchmarkId::new(format!("{mode:?}"), format!("{n}x{l}")),
                &x,
                |b, x| b.iter(|| rhs(&inst, &cache, black_box(x))),
            );
        }
    }
    group.finish();
}

fn bench_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_64x256");
    group.sample_size(10);
    let (inst, cache) = instance(64, 256, 2, GramMode::Dense);
    let tol = 1e-6;
    let euler = SolverConfig {
        tol,
        step: StepRule::SpectralEstimate,
        ..SolverConfig::default()
    };
    group.bench_function("neural_euler", |b| {
        b.iter(|| solve(&inst, &cache, &euler, None).unwrap())
    });
    let ista = BaselineConfig {
        tol,
        ..BaselineConfig::default()
    };
    group.bench_function("ista", |b| {
        b.iter(|| ista_solve(&inst, &cache, &ista, None).unwrap())
    });
    let fista = BaselineConfig {
        tol,
        ..BaselineConfig::fista()
    };
    group.bench_function("fista", |b| {
        b.iter(|| fista_solve(&inst, &cache, &fista, None).unwrap())
    });
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    let (inst, cache) = instance(16, 8, 3, GramMode::Dense);
    group.bench_function("l8", |b| {
        b.iter(|| sign_pattern_oracle(&inst, &cache).unwrap())
    });
    group.finish();
}

fn bench_projection(c: &mut Criterion) {
    let v = DVector::from_fn(4096, |i, _| (i as f64 * 0.37).sin() * 3.0);
    let bx = BoxSet::new(1.0);
    c.bench_function("project_4096", |b| b.iter(|| project(&bx, black_box(&v))));
    c.bench_function("soft_threshold_4096", |b| {
        b.iter(|| soft_threshold(1.0, black_box(&v)))
    });
}

criterion_group!(
    benches,
    bench_rhs,
    bench_solvers,
    bench_oracle,
    bench_projection
);
criterion_main!(benches);
