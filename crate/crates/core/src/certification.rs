//! Optimality certificates for a candidate `x`.
//!
//! `x` solves the lasso iff `P(AᵀAx − Aᵀb − x) = AᵀAx − Aᵀb`. Writing
//! `z = Aᵀb − AᵀAx` for the dual variable, this is `z = P(z + x)`: every
//! `|z_i| ≤ λ`, and `z_i = λ·sign(x_i)` wherever `x_i ≠ 0`. The
//! multipliers of the box constraints on `z` are the positive and negative
//! parts of `x`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dynamics::{solve, SolverConfig, StepRule};
use crate::error::Result;
use crate::oracle::{sign_pattern_oracle, ORACLE_MAX_COLUMNS};
use crate::problem::{GramCache, ProblemInstance};
use crate::projection::BoxSet;

/// `‖P(AᵀAx − Aᵀb − x) − (AᵀAx − Aᵀb)‖∞`.
pub fn fixed_point_residual(inst: &ProblemInstance, cache: &GramCache, x: &DVector<f64>) -> f64 {
    inst.check_len("x", x);
    let bx = BoxSet::new(inst.lambda());
    let g = cache.gradient(x);
    g.iter()
        .zip(x.iter())
        .map(|(g, x)| (bx.clamp(g - x) - g).abs())
        .fold(0.0, f64::max)
}

/// `z = Aᵀb − AᵀAx`.
pub fn dual_from_primal(cache: &GramCache, x: &DVector<f64>) -> DVector<f64> {
    cache.atb() - cache.apply(x)
}

/// `(u, v) = (max(x, 0), max(−x, 0))`, so `x = u − v`, `u ∘ v = 0` and
/// `u + v = |x|`. Coordinates with `x_i = 0` get `u_i = v_i = 0`.
pub fn multiplier_split(x: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    (x.map(|t| t.max(0.0)), x.map(|t| (-t).max(0.0)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub lambda: f64,
    pub tol: f64,
    pub fixed_point_residual_inf: f64,
    pub z: Vec<f64>,
    pub box_feasible: bool,
    /// `max_i max(|z_i| − λ, 0)`.
    pub max_box_violation: f64,
    /// `max |z_i − λ·sign(x_i)|` over `|x_i| > tol`.
    pub slackness_violation: f64,
    /// `‖z − P(z + x)‖∞`.
    pub dual_fixed_point_error: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `max(‖u − v − x‖∞, ‖u + v − |x|‖∞)`.
    pub multiplier_identity_error: f64,
    pub residual_ok: bool,
    pub slackness_ok: bool,
    pub passed: bool,
}

/// Build the full certificate for `x`; all verdicts use the same `tol`.
pub fn certify(
    inst: &ProblemInstance,
    cache: &GramCache,
    x: &DVector<f64>,
    tol: f64,
) -> Certificate {
    inst.check_len("x", x);
    let lambda = inst.lambda();
    let bx = BoxSet::new(lambda);
    let z = dual_from_primal(cache, x);

    // g = −z, so the primal residual reads |P(−z − x) + z| componentwise.
    let fixed_point_residual_inf = z
        .iter()
        .zip(x.iter())
        .map(|(z, x)| (bx.clamp(-z - x) + z).abs())
        .fold(0.0, f64::max);
    let max_box_violation = z
        .iter()
        .map(|z| (z.abs() - lambda).max(0.0))
        .fold(0.0, f64::max);
    let slackness_violation = z
        .iter()
        .zip(x.iter())
        .filter(|(_, x)| x.abs() > tol)
        .map(|(z, x)| (z - lambda.copysign(*x)).abs())
        .fold(0.0, f64::max);
    let dual_fixed_point_error = z
        .iter()
        .zip(x.iter())
        .map(|(z, x)| (z - bx.clamp(z + x)).abs())
        .fold(0.0, f64::max);

    let (u, v) = multiplier_split(x);
    let multiplier_identity_error = (0..x.len())
        .map(|i| {
            ((u[i] - v[i]) - x[i])
                .abs()
                .max(((u[i] + v[i]) - x[i].abs()).abs())
        })
        .fold(0.0, f64::max);

    let box_feasible = max_box_violation <= tol;
    let residual_ok = fixed_point_residual_inf <= tol;
    let slackness_ok = slackness_violation <= tol;
    let passed = residual_ok && box_feasible && slackness_ok && multiplier_identity_error <= tol;

    Certificate {
        lambda,
        tol,
        fixed_point_residual_inf,
        z: z.as_slice().to_vec(),
        box_feasible,
        max_box_violation,
        slackness_violation,
        dual_fixed_point_error,
        u: u.as_slice().to_vec(),
        v: v.as_slice().to_vec(),
        multiplier_identity_error,
        residual_ok,
        slackness_ok,
        passed,
    }
}

/// Tracks `V(x) = ½(x − x*)ᵀ(I + AᵀA)(x − x*)` against a reference solution.
///
/// The metric is applied through the Gram operator and never factored.
/// Since `I + AᵀA ⪰ I`, `V(x) ≥ ½‖x − x*‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovMonitor {
    reference: DVector<f64>,
}

impl LyapunovMonitor {
    pub fn new(reference: DVector<f64>) -> Self {
        Self { reference }
    }

    /// Reference from the most accurate solution available: the sign-pattern
    /// oracle for small instances, otherwise the network itself at `tol = 1e-12`.
    pub fn for_instance(inst: &ProblemInstance, cache: &GramCache) -> Result<Self> {
        if inst.cols() <= ORACLE_MAX_COLUMNS {
            if let Ok(x) = sign_pattern_oracle(inst, cache) {
                return Ok(Self::new(x));
            }
        }
        let cfg = SolverConfig {
            tol: 1e-12,
            step: StepRule::SpectralEstimate,
            max_steps: 5_000_000,
            ..Default::default()
        };
        Ok(Self::new(solve(inst, cache, &cfg, None)?.x))
    }

    pub fn reference(&self) -> &DVector<f64> {
        &self.reference
    }

    /// Lower constant of the sandwich `β/2‖x − x*‖² ≤ V(x)`, `β = λ_min(I + AᵀA) ≥ 1`.
    pub fn beta_lower_bound(&self) -> f64 {
        1.0
    }
}

pub fn lyapunov_value(monitor: &LyapunovMonitor, cache: &GramCache, x: &DVector<f64>) -> f64 {
    let d = x - monitor.reference();
    let gd = cache.apply(&d);
    0.5 * (d.norm_squared() + d.dot(&gd))
}
