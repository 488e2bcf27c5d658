//! Shared fixtures for the benchmarks in `benches/`.

use neurolasso::{
    build_instance_with, generate, ExperimentSpec, GramCache, GramMode, ProblemInstance,
};

/// Seeded spike instance; rows are orthonormalized only when `n ≤ l`.
pub fn instance(n: usize, l: usize, seed: u64, mode: GramMode) -> (ProblemInstance, GramCache) {
    let spec = ExperimentSpec {
        n,
        l,
        spikes: (l / 25).max(1),
        sigma: 0.01,
        lambda_factor: 0.05,
        seed,
        orthogonalize_rows: n <= l,
        ..ExperimentSpec::default()
    };
    let g = generate(&spec).expect("valid bench spec");
    build_instance_with(g.a, g.b, g.lambda, mode).expect("valid bench instance")
}
