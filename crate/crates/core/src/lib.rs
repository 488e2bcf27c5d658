//! Lasso (`min ½‖Ax − b‖² + λ‖x‖₁`) solved by integrating a one-layer
//! projection neural network to its equilibrium.
//!
//! The network state evolves as
//!
//! ```text
//! dx/dt = P(AᵀAx − Aᵀb − x) + Aᵀb − AᵀAx
//! ```
//!
//! where `P` clamps every coordinate into `[−λ, λ]`. Its equilibria are
//! exactly the lasso solutions, so the same residual that drives the
//! dynamics doubles as an optimality certificate.
//!
//! Layout:
//! - [`problem`]: the instance `(A, b, λ)`, cached Gram quantities, and the
//!   primal / smooth / dual objectives.
//! - [`projection`]: the box projection and soft thresholding.
//! - [`dynamics`]: right-hand side, Euler / RK4 / adaptive integrators and
//!   the [`solve`] driver.
//! - [`certification`]: fixed-point residual, dual variables, multiplier
//!   split, Lyapunov monitor.
//! - [`baselines`] and [`oracle`]: ISTA, FISTA and an exhaustive
//!   sign-pattern solver for small instances.
//! - [`synth`]: seeded spike-recovery experiments.
//! - [`io`]: CSV and binary matrix formats.
//!
//! ```
//! use neurolasso::{build_instance, solve, DMatrix, DVector, SolverConfig};
//!
//! let a = DMatrix::identity(2, 2);
//! let b = DVector::from_vec(vec![2.0, 0.3]);
//! let (inst, cache) = build_instance(a, b, 1.0).unwrap();
//! let res = solve(&inst, &cache, &SolverConfig::default(), None).unwrap();
//! assert!((res.x[0] - 1.0).abs() < 1e-8 && res.x[1].abs() < 1e-8);
//! ```

// `!(a > b)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod certification;
pub mod dynamics;
mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod projection;
pub mod synth;

pub use nalgebra::{DMatrix, DVector};

pub use baselines::{fista_solve, ista_solve, BaselineConfig, BaselineMethod};
pub use certification::{
    certify, dual_from_primal, fixed_point_residual, lyapunov_value, multiplier_split, Certificate,
    LyapunovMonitor,
};
pub use dynamics::{
    default_step_size, rhs, solve, solve_monitored, step_euler, step_rk4, AdaptiveParams,
    Integrator, SolveResult, SolveStatus, SolverConfig, StepRule, Trajectory, TrajectoryRecord,
};
pub use error::{Error, Result};
pub use oracle::{sign_pattern_oracle, ORACLE_MAX_COLUMNS};
pub use problem::{
    build_instance, build_instance_with, dual_objective, primal_objective, smooth_problem_check,
    GramCache, GramMode, ProblemInstance, SmoothCheck,
};
pub use projection::{project, soft_threshold, BoxSet};
pub use synth::{
    generate, least_norm_solution, recovery_metrics, ExperimentSpec, GeneratedExperiment,
    RecoveryMetrics,
};

/// Library version, embedded in run reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
