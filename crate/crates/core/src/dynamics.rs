//! The one-layer recurrent network
//!
//! ```text
//! dx/dt = F(x) = P(AᵀAx − Aᵀb − x) + Aᵀb − AᵀAx
//! ```
//!
//! and its numerical integration. `F(x) = 0` exactly at lasso solutions, so
//! `‖F(x)‖∞` is both the stopping rule and the optimality certificate.
//!
//! The right-hand side is Lipschitz (the projection is nonexpansive) but no
//! explicit constant is available, so the default step `1/(1 + ‖AᵀA‖∞)`
//! is a bound-based heuristic. Along the nonsmooth kinks of `P` low-order
//! integrators behave best; RK4 and the adaptive scheme are offered for
//! comparison rather than for accuracy.

use std::io::Write;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::certification::{lyapunov_value, LyapunovMonitor};
use crate::error::{Error, Result};
use crate::linalg::norm_inf;
use crate::problem::{primal_objective, GramCache, ProblemInstance};
use crate::projection::BoxSet;

/// Iterates larger than this in magnitude abort the solve as diverged.
pub const DIVERGENCE_BOUND: f64 = 1e12;

/// Power iterations used by [`StepRule::SpectralEstimate`].
const SPECTRAL_ITERS: usize = 100;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    #[default]
    Euler,
    Rk4,
    /// Step-doubling forward Euler with local error control.
    Adaptive,
}

/// How the (initial) step size is chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRule {
    /// `1 / (1 + gram_norm_ub)`, see [`default_step_size`].
    #[default]
    Conservative,
    /// `1 / (1 + ρ̂)` with `ρ̂` a power-iteration estimate of `‖AᵀA‖₂`.
    /// Much larger than the conservative step when the row-sum bound is
    /// loose; stays stable as long as `ρ̂ ≥ ‖AᵀA‖₂ / 2`.
    SpectralEstimate,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptiveParams {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub min_step: f64,
    pub max_step: f64,
}

impl Default for AdaptiveParams {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            min_step: 1e-8,
            max_step: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub integrator: Integrator,
    pub step: StepRule,
    /// Stopping threshold on `‖F(x)‖∞`.
    pub tol: f64,
    pub max_steps: usize,
    pub record_trajectory: bool,
    /// Keep every `record_every`-th step when recording.
    pub record_every: usize,
    pub adaptive: AdaptiveParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            integrator: Integrator::Euler,
            step: StepRule::Conservative,
            tol: 1e-8,
            max_steps: 500_000,
            record_trajectory: false,
            record_every: 1,
            adaptive: AdaptiveParams::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1".into());
        }
        if self.record_every == 0 {
            return bad("record_every must be at least 1".into());
        }
        if let StepRule::Fixed(h) = self.step {
            if !(h > 0.0 && h.is_finite()) {
                return bad(format!("step size must be positive, got {h}"));
            }
        }
        let ad = &self.adaptive;
        if self.integrator == Integrator::Adaptive
            && !(ad.rel_tol >= 0.0
                && ad.abs_tol > 0.0
                && ad.min_step > 0.0
                && ad.max_step >= ad.min_step)
        {
            return bad(format!("inconsistent adaptive parameters {ad:?}"));
        }
        Ok(())
    }

    /// The concrete (initial) step for this instance.
    pub fn resolve_step(&self, cache: &GramCache) -> f64 {
        match self.step {
            StepRule::Conservative => default_step_size(cache),
            StepRule::SpectralEstimate => {
                1.0 / (1.0 + cache.spectral_norm_estimate(SPECTRAL_ITERS))
            }
            StepRule::Fixed(h) => h,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxStepsReached,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub time: f64,
    pub x: DVector<f64>,
    pub residual_inf: f64,
    pub primal_objective: f64,
    pub lyapunov: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn lyapunov_values(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.lyapunov).collect()
    }

    /// CSV with columns `step,time,residual_inf,primal_objective[,lyapunov]`.
    /// The Lyapunov column is present only for monitored runs.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let with_v = self.records.iter().any(|r| r.lyapunov.is_some());
        write!(w, "step,time,residual_inf,primal_objective")?;
        if with_v {
            write!(w, ",lyapunov")?;
        }
        writeln!(w)?;
        for r in &self.records {
            write!(
                w,
                "{},{:e},{:e},{:e}",
                r.step, r.time, r.residual_inf, r.primal_objective
            )?;
            if with_v {
                match r.lyapunov {
                    Some(v) => write!(w, ",{v:e}")?,
                    None => write!(w, ",")?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x: DVector<f64>,
    pub status: SolveStatus,
    pub steps_taken: usize,
    pub final_residual: f64,
    /// Pseudo-time reached by the integrator (zero for iterative baselines).
    pub time: f64,
    /// Step actually used: the fixed step, or the initial step for adaptive runs.
    pub step_size: f64,
    pub trajectory: Option<Trajectory>,
}

impl SolveResult {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

/// `F(x) = P(AᵀAx − Aᵀb − x) + Aᵀb − AᵀAx`.
pub fn rhs(inst: &ProblemInstance, cache: &GramCache, x: &DVector<f64>) -> DVector<f64> {
    inst.check_len("x", x);
    let bx = BoxSet::new(inst.lambda());
    let grad = cache.gradient(x);
    DVector::from_fn(x.len(), |i, _| {
        let g = grad[i];
        bx.clamp(g - x[i]) - g
    })
}

pub fn step_euler(
    inst: &ProblemInstance,
    cache: &GramCache,
    x: &DVector<f64>,
    h: f64,
) -> DVector<f64> {
    x + rhs(inst, cache, x) * h
}

/// Classical fourth-order Runge–Kutta step.
pub fn step_rk4(
    inst: &ProblemInstance,
    cache: &GramCache,
    x: &DVector<f64>,
    h: f64,
) -> DVector<f64> {
    let k1 = rhs(inst, cache, x);
    rk4_from(inst, cache, x, &k1, h)
}

fn rk4_from(
    inst: &ProblemInstance,
    cache: &GramCache,
    x: &DVector<f64>,
    k1: &DVector<f64>,
    h: f64,
) -> DVector<f64> {
    let k2 = rhs(inst, cache, &(x + k1 * (0.5 * h)));
    let k3 = rhs(inst, cache, &(x + &k2 * (0.5 * h)));
    let k4 = rhs(inst, cache, &(x + &k3 * h));
    x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// `1 / (1 + gram_norm_ub)`.
///
/// The Jacobian of `F` (where defined) has rows of either `−I` or `−AᵀA`,
/// so its spectrum lies in `[−max(1, ‖AᵀA‖₂), 0]`; this step keeps forward
/// Euler well inside its stability interval and also guarantees discrete
/// descent of the Lyapunov function.
pub fn default_step_size(cache: &GramCache) -> f64 {
    1.0 / (1.0 + cache.gram_norm_ub())
}

/// Integrate from `x0` (zero when `None`) until `‖F(x)‖∞ ≤ tol`.
pub fn solve(
    inst: &ProblemInstance,
    cache: &GramCache,
    config: &SolverConfig,
    x0: Option<&DVector<f64>>,
) -> Result<SolveResult> {
    solve_monitored(inst, cache, config, x0, None)
}

/// As [`solve`], additionally evaluating the Lyapunov function at every
/// recorded step.
pub fn solve_monitored(
    inst: &ProblemInstance,
    cache: &GramCache,
    config: &SolverConfig,
    x0: Option<&DVector<f64>>,
    monitor: Option<&LyapunovMonitor>,
) -> Result<SolveResult> {
    config.validate()?;
    let l = inst.cols();
    if cache.dim() != l {
        return Err(Error::DimensionMismatch {
            left: "instance",
            left_shape: inst.a().shape(),
            right: "Gram cache",
            right_shape: (cache.dim(), cache.dim()),
        });
    }
    let mut x = match x0 {
        Some(x0) if x0.len() != l => {
            return Err(Error::DimensionMismatch {
                left: "A",
                left_shape: inst.a().shape(),
                right: "x0",
                right_shape: (x0.len(), 1),
            })
        }
        Some(x0) => x0.clone(),
        None => DVector::zeros(l),
    };
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("x0"));
    }
    if let Some(m) = monitor {
        if m.reference().len() != l {
            return Err(Error::DimensionMismatch {
                left: "A",
                left_shape: inst.a().shape(),
                right: "Lyapunov reference",
                right_shape: (m.reference().len(), 1),
            });
        }
    }

    let h0 = config.resolve_step(cache);
    let mut h = h0;
    let mut t = 0.0;
    let mut f = rhs(inst, cache, &x);
    let mut traj = config.record_trajectory.then(Trajectory::default);
    let ad = config.adaptive;

    let mut k = 0usize;
    let (status, residual) = loop {
        let r = norm_inf(&f);
        let blown = !r.is_finite()
            || x.iter()
                .any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND);
        if let Some(tr) = traj.as_mut() {
            let stopping = blown || r <= config.tol || k == config.max_steps;
            if k % config.record_every == 0 || stopping {
                tr.records.push(TrajectoryRecord {
                    step: k,
                    time: t,
                    x: x.clone(),
                    residual_inf: r,
                    primal_objective: primal_objective(inst, &x),
                    lyapunov: monitor.map(|m| lyapunov_value(m, cache, &x)),
                });
            }
        }
        if blown {
            break (SolveStatus::Diverged, r);
        }
        if r <= config.tol {
            break (SolveStatus::Converged, r);
        }
        if k == config.max_steps {
            break (SolveStatus::MaxStepsReached, r);
        }

        match config.integrator {
            Integrator::Euler => {
                x.axpy(h, &f, 1.0);
                t += h;
            }
            Integrator::Rk4 => {
                x = rk4_from(inst, cache, &x, &f, h);
                t += h;
            }
            Integrator::Adaptive => loop {
                let full = &x + &f * h;
                let half = &x + &f * (0.5 * h);
                let f_half = rhs(inst, cache, &half);
                let two = &half + f_half * (0.5 * h);
                let err = full
                    .iter()
                    .zip(two.iter())
                    .zip(x.iter())
                    .map(|((a, b), x0)| {
                        (a - b).abs() / (ad.abs_tol + ad.rel_tol * x0.abs().max(b.abs()))
                    })
                    .fold(0.0, f64::max);
                let factor = if err > 0.0 { 0.9 / err.sqrt() } else { 5.0 };
                if err <= 1.0 || h <= ad.min_step {
                    x = two;
                    t += h;
                    h = (h * factor.min(5.0)).clamp(ad.min_step, ad.max_step);
                    break;
                }
                h = (h * factor.max(0.2)).max(ad.min_step);
            },
        }
        f = rhs(inst, cache, &x);
        k += 1;
    };

    Ok(SolveResult {
        x,
        status,
        steps_taken: k,
        final_residual: residual,
        time: t,
        step_size: h0,
        trajectory: traj,
    })
}
