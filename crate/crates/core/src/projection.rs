//! Box projection onto `[−λ, λ]^l` and soft thresholding.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

/// The box `Ω = [−λ, λ]^l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSet {
    lambda: f64,
}

impl BoxSet {
    /// # Panics
    /// If `lambda` is negative or not finite.
    pub fn new(lambda: f64) -> Self {
        assert!(
            lambda.is_finite() && lambda >= 0.0,
            "box half-width must be finite and >= 0"
        );
        Self { lambda }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn clamp(&self, w: f64) -> f64 {
        // |w| <= λ keeps w itself; all three branches agree on the boundary.
        w.max(-self.lambda).min(self.lambda)
    }

    pub fn contains(&self, w: &DVector<f64>) -> bool {
        w.iter().all(|v| v.abs() <= self.lambda)
    }

    pub fn project_in_place(&self, w: &mut DVector<f64>) {
        w.apply(|v| *v = self.clamp(*v));
    }
}

/// Componentwise clamp of `w` into the box.
pub fn project(bx: &BoxSet, w: &DVector<f64>) -> DVector<f64> {
    w.map(|v| bx.clamp(v))
}

#[inline]
pub fn soft_threshold_scalar(t: f64, v: f64) -> f64 {
    let m = v.abs() - t;
    if m > 0.0 {
        m.copysign(v)
    } else {
        0.0
    }
}

/// `sign(v_i)·max(|v_i| − t, 0)`, the proximal map of `t‖·‖₁`.
pub fn soft_threshold(t: f64, v: &DVector<f64>) -> DVector<f64> {
    assert!(t >= 0.0, "threshold must be non-negative");
    v.map(|x| soft_threshold_scalar(t, x))
}
