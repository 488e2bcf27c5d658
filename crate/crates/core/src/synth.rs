//! Seeded spike-recovery experiments.
//!
//! A sparse `±1` spike train `x0` is corrupted by Gaussian noise and
//! measured through a standard-normal matrix with (by default)
//! orthonormalized rows; `λ` is set as a fraction of `‖Aᵀb‖∞`.

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    /// Measurements (rows of `A`).
    pub n: usize,
    /// Signal length (columns of `A`).
    pub l: usize,
    pub spikes: usize,
    pub amplitude_set: Vec<f64>,
    /// Noise standard deviation.
    pub sigma: f64,
    /// `λ = lambda_factor · ‖Aᵀb‖∞`.
    pub lambda_factor: f64,
    pub seed: u64,
    pub orthogonalize_rows: bool,
    /// `b = A·x0 + ε` instead of the default `b = A·(x0 + ε)`.
    pub noise_on_observation: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self::desk_scale()
    }
}

impl ExperimentSpec {
    /// 1024 × 4096 with 160 spikes.
    pub fn full_scale() -> Self {
        Self {
            n: 1024,
            l: 4096,
            spikes: 160,
            ..Self::desk_scale()
        }
    }

    /// The same experiment a quarter the size: 256 × 1024 with 40 spikes.
    pub fn desk_scale() -> Self {
        Self {
            n: 256,
            l: 1024,
            spikes: 40,
            amplitude_set: vec![-1.0, 1.0],
            sigma: 0.1,
            lambda_factor: 0.01,
            seed: 0,
            orthogonalize_rows: true,
            noise_on_observation: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.n == 0 || self.l == 0 {
            return bad(format!(
                "dimensions must be positive, got n={} l={}",
                self.n, self.l
            ));
        }
        if self.spikes > self.l {
            return bad(format!(
                "spikes ({}) exceeds signal length l ({})",
                self.spikes, self.l
            ));
        }
        if self.amplitude_set.is_empty() || self.amplitude_set.iter().any(|a| !a.is_finite()) {
            return bad("amplitude_set must be a non-empty set of finite values".into());
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be finite and >= 0, got {}", self.sigma));
        }
        if !(self.lambda_factor > 0.0 && self.lambda_factor.is_finite()) {
            return bad(format!(
                "lambda_factor must be positive, got {}",
                self.lambda_factor
            ));
        }
        if self.orthogonalize_rows && self.n > self.l {
            return bad(format!(
                "cannot orthonormalize {} rows of length {}",
                self.n, self.l
            ));
        }
        Ok(())
    }

    /// Non-fatal remarks about the spec.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.n > self.l {
            w.push(format!(
                "n = {} > l = {}: the system is not underdetermined",
                self.n, self.l
            ));
        }
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedExperiment {
    pub x0: DVector<f64>,
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub lambda: f64,
}

/// Draw `(x0, A, b, λ)`. Identical specs give bit-identical output.
///
/// Draw order from a single ChaCha8 stream: spike positions, amplitudes,
/// entries of `A` (row-major), noise.
pub fn generate(spec: &ExperimentSpec) -> Result<GeneratedExperiment> {
    spec.validate()?;
    let (n, l) = (spec.n, spec.l);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut positions = index::sample(&mut rng, l, spec.spikes).into_vec();
    positions.sort_unstable();
    let mut x0 = DVector::zeros(l);
    for &p in &positions {
        x0[p] = spec.amplitude_set[rng.random_range(0..spec.amplitude_set.len())];
    }

    let entries: Vec<f64> = (0..n * l).map(|_| rng.sample(StandardNormal)).collect();
    let mut a = DMatrix::from_row_slice(n, l, &entries);
    if spec.orthogonalize_rows {
        a = orthonormalize_rows(a);
    }

    let noise_len = if spec.noise_on_observation { n } else { l };
    let noise = DVector::from_iterator(
        noise_len,
        (0..noise_len).map(|_| spec.sigma * rng.sample::<f64, _>(StandardNormal)),
    );
    let b = if spec.noise_on_observation {
        &a * &x0 + noise
    } else {
        &a * (&x0 + noise)
    };

    let lambda = spec.lambda_factor * linalg::norm_inf(&linalg::tr_mul(&a, &b));
    Ok(GeneratedExperiment { x0, a, b, lambda })
}

/// Orthonormal basis of the row space, via the thin QR factorization of `Aᵀ`.
fn orthonormalize_rows(a: DMatrix<f64>) -> DMatrix<f64> {
    a.transpose().qr().q().transpose()
}

/// Minimum-ℓ2-norm solution of `Ax = b`, i.e. `Aᵀ(AAᵀ)⁻¹b`. With
/// orthonormal rows this is exactly `Aᵀb`. Falls back to an SVD
/// pseudo-inverse when `AAᵀ` is singular.
pub fn least_norm_solution(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let aat = a * a.transpose();
    match aat.cholesky() {
        Some(chol) => linalg::tr_mul(a, &chol.solve(b)),
        None => a
            .clone()
            .svd(true, true)
            .solve(b, 1e-12)
            .unwrap_or_else(|_| linalg::tr_mul(a, b)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryMetrics {
    /// `‖xhat − x0‖ / ‖x0‖`, or `‖xhat − x0‖` when `x0 = 0`.
    pub relative_error: f64,
    /// Set when `x0 = 0` and `relative_error` is actually absolute.
    pub error_is_absolute: bool,
    /// Fraction of `|xhat_i| > threshold` that are true spikes (1 when nothing is detected).
    pub precision: f64,
    /// Fraction of true spikes with `|xhat_i| > threshold` (1 when `x0 = 0`).
    pub recall: f64,
    pub detected: usize,
    pub true_support: usize,
}

pub fn recovery_metrics(
    x0: &DVector<f64>,
    xhat: &DVector<f64>,
    support_threshold: f64,
) -> RecoveryMetrics {
    assert_eq!(x0.len(), xhat.len(), "signals must have equal length");
    let err = (xhat - x0).norm();
    let scale = x0.norm();
    let truth = |i: usize| x0[i] != 0.0;
    let hit = |i: usize| xhat[i].abs() > support_threshold;
    let true_support = (0..x0.len()).filter(|&i| truth(i)).count();
    let detected = (0..x0.len()).filter(|&i| hit(i)).count();
    let both = (0..x0.len()).filter(|&i| truth(i) && hit(i)).count();
    RecoveryMetrics {
        relative_error: if scale > 0.0 { err / scale } else { err },
        error_is_absolute: scale == 0.0,
        precision: if detected > 0 {
            both as f64 / detected as f64
        } else {
            1.0
        },
        recall: if true_support > 0 {
            both as f64 / true_support as f64
        } else {
            1.0
        },
        detected,
        true_support,
    }
}
