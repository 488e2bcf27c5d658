#![allow(dead_code)]

use neurolasso::{build_instance, DMatrix, DVector, GramCache, ProblemInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Gaussian `n×l` instance with `λ = factor·‖Aᵀb‖∞`.
pub fn random_instance(seed: u64, n: usize, l: usize, factor: f64) -> (ProblemInstance, GramCache) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, l, |_, _| rng.sample::<f64, _>(StandardNormal));
    let b = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let lambda = factor * a.tr_mul(&b).amax();
    build_instance(a, b, lambda).unwrap()
}

pub fn random_vector(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(len, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

/// Subgradient optimality conditions checked directly on `Aᵀ(b − Ax)`.
pub fn subgradient_violation(inst: &ProblemInstance, x: &DVector<f64>, support_tol: f64) -> f64 {
    let c = inst.a().tr_mul(&(inst.b() - inst.a() * x));
    let lam = inst.lambda();
    (0..x.len())
        .map(|i| {
            if x[i].abs() > support_tol {
                (c[i] - lam * x[i].signum()).abs()
            } else {
                (c[i].abs() - lam).max(0.0)
            }
        })
        .fold(0.0, f64::max)
}
