//! Cross-checks against the exhaustive sign-pattern solver.

mod common;

use common::{random_instance, random_vector, subgradient_violation};
use neurolasso::{
    certify, dual_from_primal, dual_objective, fixed_point_residual, ista_solve, primal_objective,
    project, sign_pattern_oracle, smooth_problem_check, solve, BaselineConfig, BoxSet, DVector,
    SolverConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FACTORS: [f64; 3] = [0.05, 0.3, 0.8];

#[test]
fn oracle_matches_tight_ista() {
    let cfg = BaselineConfig {
        tol: 1e-12,
        ..Default::default()
    };
    for seed in 0..100 {
        let (inst, cache) = random_instance(seed, 10, 5, FACTORS[seed as usize % 3]);
        let exact = sign_pattern_oracle(&inst, &cache).unwrap();
        let ista = ista_solve(&inst, &cache, &cfg, None).unwrap();
        assert!(ista.converged(), "seed {seed}");
        assert!(
            (&exact - &ista.x).amax() <= 1e-8,
            "seed {seed}: {}",
            (&exact - &ista.x).amax()
        );
    }
}

#[test]
fn oracle_solutions_certify() {
    for seed in 0..100 {
        let (inst, cache) = random_instance(1000 + seed, 10, 5, FACTORS[seed as usize % 3]);
        let x = sign_pattern_oracle(&inst, &cache).unwrap();
        assert!(
            fixed_point_residual(&inst, &cache, &x) <= 1e-9,
            "seed {seed}"
        );
        let cert = certify(&inst, &cache, &x, 1e-8);
        assert!(cert.passed, "seed {seed}: {cert:?}");
        assert!(smooth_problem_check(&inst, &cache, &x).max_violation <= 1e-12);
        assert!(cert.max_box_violation <= 1e-8);
        // ‖x‖₁ = Σ(u + v) exactly.
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        let uv: f64 = cert.u.iter().zip(&cert.v).map(|(u, v)| u + v).sum();
        assert_eq!(l1, uv);

        // Perturbation probe: the certificate must fail loudly.
        let mut bumped = x.clone();
        bumped[0] += 0.1;
        assert!(fixed_point_residual(&inst, &cache, &bumped) > 1e-3);
    }
}

#[test]
fn neural_matches_oracle_on_12x6() {
    for seed in 0..20 {
        let (inst, cache) = random_instance(2000 + seed, 12, 6, 0.3);
        let exact = sign_pattern_oracle(&inst, &cache).unwrap();
        let res = solve(&inst, &cache, &SolverConfig::default(), None).unwrap();
        assert!(res.converged());
        assert!((&exact - &res.x).amax() <= 1e-6, "seed {seed}");
        // Converged output also satisfies the subgradient conditions.
        assert!(subgradient_violation(&inst, &res.x, 1e-8) <= 1e-7);
    }
}

#[test]
fn oracle_solution_beats_random_perturbations() {
    let (inst, cache) = random_instance(77, 10, 4, 0.3);
    let x = sign_pattern_oracle(&inst, &cache).unwrap();
    let best = primal_objective(&inst, &x);
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    for _ in 0..1000 {
        let scale = 10f64.powf(rng.random_range(-4.0..0.0));
        let y = &x + random_vector(&mut rng, 4, scale);
        assert!(primal_objective(&inst, &y) >= best - 1e-12);
    }
}

#[test]
fn residual_certificate_is_equivalent_to_subgradient_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..60 {
        let (inst, cache) = random_instance(3000 + seed, 8, 4, FACTORS[seed as usize % 3]);
        let exact = sign_pattern_oracle(&inst, &cache).unwrap();
        // Optimal point: both tests pass.
        assert!(fixed_point_residual(&inst, &cache, &exact) <= 1e-9);
        assert!(subgradient_violation(&inst, &exact, 0.0) <= 1e-7);
        // Non-optimal points: both tests fail.
        let y = &exact + random_vector(&mut rng, 4, 0.05);
        assert!(fixed_point_residual(&inst, &cache, &y) > 1e-9);
        assert!(subgradient_violation(&inst, &y, 0.0) > 1e-7);
    }
}

#[test]
fn dual_minimizer_matches_primal_map() {
    // Projected gradient on ½zᵀG⁻¹z − zᵀG⁻¹Aᵀb over the box; the minimizer
    // must equal z* = Aᵀb − AᵀAx* for the oracle solution x*.
    for seed in 0..10 {
        let (inst, cache) = random_instance(4000 + seed, 12, 4, FACTORS[seed as usize % 3]);
        let x_star = sign_pattern_oracle(&inst, &cache).unwrap();
        let z_star = dual_from_primal(&cache, &x_star);

        let g = cache.gram().unwrap().clone();
        let chol = g.clone().cholesky().unwrap();
        let hess_norm = 1.0 / g.symmetric_eigenvalues().min();
        let bx = BoxSet::new(inst.lambda());
        let mut z = DVector::zeros(4);
        for _ in 0..200_000 {
            let grad = chol.solve(&(&z - cache.atb()));
            let next = project(&bx, &(&z - grad / hess_norm));
            let done = (&next - &z).amax() < 1e-15;
            z = next;
            if done {
                break;
            }
        }
        assert!(
            (&z - &z_star).amax() <= 1e-6,
            "seed {seed}: {}",
            (&z - &z_star).amax()
        );

        // And no random box-feasible z does better.
        let best = dual_objective(&cache, &z_star).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let w = DVector::from_fn(4, |_, _| rng.random_range(-inst.lambda()..=inst.lambda()));
            assert!(dual_objective(&cache, &w).unwrap() >= best - 1e-9);
        }
    }
}

#[test]
fn unregularized_oracle_solves_square_system() {
    let (inst, cache) = random_instance(9, 6, 6, 0.0);
    let x = sign_pattern_oracle(&inst, &cache).unwrap();
    assert!((inst.a() * &x - inst.b()).amax() <= 1e-9);
}
