//! Proximal-gradient baselines.
//!
//! Both methods stop on the same fixed-point residual as the network so
//! their results are directly comparable.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dynamics::{SolveResult, SolveStatus, Trajectory, TrajectoryRecord, DIVERGENCE_BOUND};
use crate::error::{Error, Result};
use crate::problem::{primal_objective, GramCache, ProblemInstance};
use crate::projection::{soft_threshold_scalar, BoxSet};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineMethod {
    #[default]
    Ista,
    Fista,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    /// Gradient step; `None` means `1 / gram_norm_ub`.
    pub step: Option<f64>,
    pub tol: f64,
    pub max_iters: usize,
    pub record_trajectory: bool,
    pub record_every: usize,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            method: BaselineMethod::Ista,
            step: None,
            tol: 1e-8,
            max_iters: 1_000_000,
            record_trajectory: false,
            record_every: 1,
        }
    }
}

impl BaselineConfig {
    pub fn fista() -> Self {
        Self {
            method: BaselineMethod::Fista,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig(
                "record_every must be at least 1".into(),
            ));
        }
        if let Some(s) = self.step {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "step must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }

    pub fn resolve_step(&self, cache: &GramCache) -> f64 {
        self.step.unwrap_or_else(|| {
            let ub = cache.gram_norm_ub();
            if ub > 0.0 {
                1.0 / ub
            } else {
                1.0
            }
        })
    }
}

fn start_point(inst: &ProblemInstance, x0: Option<&DVector<f64>>) -> Result<DVector<f64>> {
    match x0 {
        Some(x0) if x0.len() != inst.cols() => Err(Error::DimensionMismatch {
            left: "A",
            left_shape: inst.a().shape(),
            right: "x0",
            right_shape: (x0.len(), 1),
        }),
        Some(x0) => Ok(x0.clone()),
        None => Ok(DVector::zeros(inst.cols())),
    }
}

/// Residual `‖P(g − x) − g‖∞` for a precomputed gradient `g = AᵀAx − Aᵀb`.
fn residual_from_gradient(bx: &BoxSet, x: &DVector<f64>, g: &DVector<f64>) -> f64 {
    g.iter()
        .zip(x.iter())
        .map(|(g, x)| (bx.clamp(g - x) - g).abs())
        .fold(0.0, f64::max)
}

/// `soft(step·λ, y − step·g)`.
fn prox_step(y: &DVector<f64>, g: &DVector<f64>, step: f64, lambda: f64) -> DVector<f64> {
    let t = step * lambda;
    DVector::from_fn(y.len(), |i, _| soft_threshold_scalar(t, y[i] - step * g[i]))
}

pub fn ista_solve(
    inst: &ProblemInstance,
    cache: &GramCache,
    config: &BaselineConfig,
    x0: Option<&DVector<f64>>,
) -> Result<SolveResult> {
    run(
        inst,
        cache,
        &BaselineConfig {
            method: BaselineMethod::Ista,
            ..config.clone()
        },
        x0,
    )
}

/// Nesterov-accelerated variant with the standard `t_{k+1} = (1 + √(1 + 4t_k²))/2`
/// momentum schedule. `AᵀA·y` is carried along by linearity, so each
/// iteration costs one Gram product like ISTA.
pub fn fista_solve(
    inst: &ProblemInstance,
    cache: &GramCache,
    config: &BaselineConfig,
    x0: Option<&DVector<f64>>,
) -> Result<SolveResult> {
    run(
        inst,
        cache,
        &BaselineConfig {
            method: BaselineMethod::Fista,
            ..config.clone()
        },
        x0,
    )
}

fn run(
    inst: &ProblemInstance,
    cache: &GramCache,
    config: &BaselineConfig,
    x0: Option<&DVector<f64>>,
) -> Result<SolveResult> {
    config.validate()?;
    let lambda = inst.lambda();
    let bx = BoxSet::new(lambda);
    let step = config.resolve_step(cache);
    let accelerated = config.method == BaselineMethod::Fista;

    let mut x = start_point(inst, x0)?;
    let mut gx = cache.apply(&x);
    let mut y = x.clone();
    let mut gy = gx.clone();
    let mut t = 1.0f64;
    let mut traj = config.record_trajectory.then(Trajectory::default);

    let mut k = 0usize;
    let (status, residual) = loop {
        let grad_x = &gx - cache.atb();
        let r = residual_from_gradient(&bx, &x, &grad_x);
        let blown = !r.is_finite()
            || x.iter()
                .any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND);
        if let Some(tr) = traj.as_mut() {
            let stopping = blown || r <= config.tol || k == config.max_iters;
            if k % config.record_every == 0 || stopping {
                tr.records.push(TrajectoryRecord {
                    step: k,
                    time: 0.0,
                    x: x.clone(),
                    residual_inf: r,
                    primal_objective: primal_objective(inst, &x),
                    lyapunov: None,
                });
            }
        }
        if blown {
            break (SolveStatus::Diverged, r);
        }
        if r <= config.tol {
            break (SolveStatus::Converged, r);
        }
        if k == config.max_iters {
            break (SolveStatus::MaxStepsReached, r);
        }

        if accelerated {
            let grad_y = &gy - cache.atb();
            let x_new = prox_step(&y, &grad_y, step, lambda);
            let gx_new = cache.apply(&x_new);
            let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_new;
            y = &x_new + (&x_new - &x) * beta;
            gy = &gx_new + (&gx_new - &gx) * beta;
            x = x_new;
            gx = gx_new;
            t = t_new;
        } else {
            x = prox_step(&x, &grad_x, step, lambda);
            gx = cache.apply(&x);
        }
        k += 1;
    };

    Ok(SolveResult {
        x,
        status,
        steps_taken: k,
        final_residual: residual,
        time: 0.0,
        step_size: step,
        trajectory: traj,
    })
}
