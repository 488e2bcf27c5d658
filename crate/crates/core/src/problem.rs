//! Problem instance, Gram cache and objective evaluations.
//!
//! Evaluators panic when a vector has the wrong length; constructors and
//! solvers report shape problems as [`Error`] values instead.

use std::borrow::Cow;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Relative pivot threshold below which the Gram matrix is treated as singular.
pub const SINGULAR_PIVOT_RATIO: f64 = 1e-10;

/// The lasso instance `min ½‖Ax − b‖² + λ‖x‖₁`.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    a: DMatrix<f64>,
    b: DVector<f64>,
    lambda: f64,
}

impl ProblemInstance {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, lambda: f64) -> Result<Self> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::Empty("A"));
        }
        if b.len() != a.nrows() {
            return Err(Error::DimensionMismatch {
                left: "A",
                left_shape: a.shape(),
                right: "b",
                right_shape: (b.len(), 1),
            });
        }
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidLambda(lambda));
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("A"));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("b"));
        }
        Ok(Self { a, b, lambda })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of measurements `n` (rows of `A`).
    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    /// Number of coefficients `l` (columns of `A`).
    pub fn cols(&self) -> usize {
        self.a.ncols()
    }

    /// Same data, different regularization weight.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidLambda(lambda));
        }
        Ok(Self {
            lambda,
            ..self.clone()
        })
    }

    pub(crate) fn check_len(&self, what: &str, x: &DVector<f64>) {
        assert_eq!(
            x.len(),
            self.cols(),
            "{what} has length {} but the instance has {} columns",
            x.len(),
            self.cols()
        );
    }
}

/// How `AᵀA·x` is applied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GramMode {
    /// Form `AᵀA` once and reuse it.
    #[default]
    Dense,
    /// Apply `Aᵀ(A·x)` as two products; never forms `AᵀA`.
    MatrixFree,
}

#[derive(Debug, Clone)]
enum GramOperator {
    Dense(DMatrix<f64>),
    /// `a` is n×l, `at` is its l×n transpose; both column-major so every
    /// product is a run of contiguous dot products.
    MatrixFree {
        a: DMatrix<f64>,
        at: DMatrix<f64>,
    },
}

/// `AᵀA`, `Aᵀb` and an upper bound on `‖AᵀA‖₂`.
#[derive(Debug, Clone)]
pub struct GramCache {
    op: GramOperator,
    atb: DVector<f64>,
    gram_norm_ub: f64,
}

impl GramCache {
    pub fn new(inst: &ProblemInstance, mode: GramMode) -> Self {
        let a = inst.a();
        let atb = linalg::tr_mul(a, inst.b());
        match mode {
            GramMode::Dense => {
                let gram = gram_matrix(a);
                let gram_norm_ub = linalg::inf_norm_bound(&gram);
                Self {
                    op: GramOperator::Dense(gram),
                    atb,
                    gram_norm_ub,
                }
            }
            GramMode::MatrixFree => {
                // ‖AᵀA‖∞ ≤ ‖Aᵀ‖∞‖A‖∞ = ‖A‖₁‖A‖∞.
                let gram_norm_ub = linalg::one_norm_bound(a) * linalg::inf_norm_bound(a);
                let at = a.transpose();
                Self {
                    op: GramOperator::MatrixFree { a: a.clone(), at },
                    atb,
                    gram_norm_ub,
                }
            }
        }
    }

    pub fn mode(&self) -> GramMode {
        match self.op {
            GramOperator::Dense(_) => GramMode::Dense,
            GramOperator::MatrixFree { .. } => GramMode::MatrixFree,
        }
    }

    pub fn dim(&self) -> usize {
        self.atb.len()
    }

    pub fn atb(&self) -> &DVector<f64> {
        &self.atb
    }

    /// Max absolute row sum of `AᵀA` (dense) or `‖A‖₁‖A‖∞` (matrix-free).
    /// Both dominate the spectral norm.
    pub fn gram_norm_ub(&self) -> f64 {
        self.gram_norm_ub
    }

    /// The stored Gram matrix, if running in dense mode.
    pub fn gram(&self) -> Option<&DMatrix<f64>> {
        match &self.op {
            GramOperator::Dense(g) => Some(g),
            GramOperator::MatrixFree { .. } => None,
        }
    }

    /// The Gram matrix, formed on demand in matrix-free mode.
    pub fn gram_matrix(&self) -> Cow<'_, DMatrix<f64>> {
        match &self.op {
            GramOperator::Dense(g) => Cow::Borrowed(g),
            GramOperator::MatrixFree { a, .. } => Cow::Owned(gram_matrix(a)),
        }
    }

    /// `AᵀA·x`.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        self.apply_into(x, &mut out);
        out
    }

    pub fn apply_into(&self, x: &DVector<f64>, out: &mut DVector<f64>) {
        assert_eq!(
            x.len(),
            self.dim(),
            "vector length does not match the Gram dimension"
        );
        match &self.op {
            // Symmetric, so row i is column i.
            GramOperator::Dense(g) => linalg::columns_dot_into(g, x.as_slice(), out.as_mut_slice()),
            GramOperator::MatrixFree { a, at } => {
                let mut ax = DVector::zeros(a.nrows());
                linalg::columns_dot_into(at, x.as_slice(), ax.as_mut_slice());
                linalg::columns_dot_into(a, ax.as_slice(), out.as_mut_slice());
            }
        }
    }

    /// `AᵀAx − Aᵀb`, the gradient of `½‖Ax − b‖²`.
    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = self.apply(x);
        g -= &self.atb;
        g
    }

    /// Power-iteration estimate of `‖AᵀA‖₂`, capped by [`Self::gram_norm_ub`].
    pub fn spectral_norm_estimate(&self, iters: usize) -> f64 {
        linalg::power_iteration(self.dim(), iters, |v| self.apply(v)).min(self.gram_norm_ub)
    }
}

/// `AᵀA` computed column by column over the upper triangle and mirrored, so
/// the result is exactly symmetric.
fn gram_matrix(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, l) = a.shape();
    let data = a.as_slice();
    let col = |j: usize| &data[j * n..(j + 1) * n];
    let upper: Vec<Vec<f64>> = (0..l)
        .into_par_iter()
        .with_min_len(8)
        .map(|j| (0..=j).map(|i| linalg::dot(col(i), col(j))).collect())
        .collect();
    let mut g = DMatrix::zeros(l, l);
    for (j, colj) in upper.iter().enumerate() {
        for (i, &v) in colj.iter().enumerate() {
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// Validate `(A, b, λ)` and precompute the dense Gram cache.
pub fn build_instance(
    a: DMatrix<f64>,
    b: DVector<f64>,
    lambda: f64,
) -> Result<(ProblemInstance, GramCache)> {
    build_instance_with(a, b, lambda, GramMode::Dense)
}

pub fn build_instance_with(
    a: DMatrix<f64>,
    b: DVector<f64>,
    lambda: f64,
    mode: GramMode,
) -> Result<(ProblemInstance, GramCache)> {
    let inst = ProblemInstance::new(a, b, lambda)?;
    let cache = GramCache::new(&inst, mode);
    Ok((inst, cache))
}

/// `½‖Ax − b‖² + λ‖x‖₁`.
pub fn primal_objective(inst: &ProblemInstance, x: &DVector<f64>) -> f64 {
    inst.check_len("x", x);
    let r = inst.a() * x - inst.b();
    0.5 * r.norm_squared() + inst.lambda() * x.lp_norm(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothCheck {
    /// `xᵀAᵀAx`.
    pub objective: f64,
    /// `max_i max(|(AᵀAx − Aᵀb)_i| − λ, 0)`.
    pub max_violation: f64,
}

/// Objective and box feasibility of the smooth reformulation
/// `min xᵀAᵀAx  s.t.  −λ ≤ AᵀAx − Aᵀb ≤ λ`.
pub fn smooth_problem_check(
    inst: &ProblemInstance,
    cache: &GramCache,
    x: &DVector<f64>,
) -> SmoothCheck {
    inst.check_len("x", x);
    let gx = cache.apply(x);
    let objective = x.dot(&gx);
    let lambda = inst.lambda();
    let max_violation = gx
        .iter()
        .zip(cache.atb().iter())
        .map(|(g, c)| ((g - c).abs() - lambda).max(0.0))
        .fold(0.0, f64::max);
    SmoothCheck {
        objective,
        max_violation,
    }
}

/// Dual objective `½zᵀ(AᵀA)⁻¹z − zᵀ(AᵀA)⁻¹Aᵀb`, evaluated with a Cholesky
/// solve. Only defined when `AᵀA` is numerically nonsingular.
pub fn dual_objective(cache: &GramCache, z: &DVector<f64>) -> Result<f64> {
    assert_eq!(z.len(), cache.dim(), "z has the wrong length");
    let threshold = SINGULAR_PIVOT_RATIO * cache.gram_norm_ub();
    let (chol, pivot) = linalg::cholesky_with_pivot(cache.gram_matrix().into_owned()).ok_or(
        Error::DualUnavailable {
            pivot: 0.0,
            threshold,
        },
    )?;
    if !(pivot > threshold) {
        return Err(Error::DualUnavailable { pivot, threshold });
    }
    let ginv_z = chol.solve(z);
    let ginv_atb = chol.solve(cache.atb());
    Ok(0.5 * z.dot(&ginv_z) - z.dot(&ginv_atb))
}
