//! Dense kernels with a fixed reduction order.
//!
//! Every product is computed as a set of independent dot products over
//! contiguous columns, each summed in the same order regardless of how the
//! outputs are split across threads. Results are therefore bit-identical
//! for any `NEUROLASSO_THREADS` setting.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Environment variable capping the data-parallel width.
pub const THREADS_ENV: &str = "NEUROLASSO_THREADS";

/// Below this many multiply-adds a product runs on the calling thread.
const PAR_THRESHOLD: usize = 1 << 16;

/// Configure the global rayon pool from `NEUROLASSO_THREADS`.
///
/// Returns the thread count that was requested, if any. Has no effect when
/// the variable is unset or the global pool was already initialized.
pub fn configure_threads_from_env() -> Option<usize> {
    let n = std::env::var(THREADS_ENV)
        .ok()?
        .trim()
        .parse::<usize>()
        .ok()?;
    let n = n.max(1);
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Some(n)
}

/// Dot product with eight interleaved accumulators combined in a fixed tree.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// `out[j] = ⟨column j of m, x⟩`, i.e. `out = mᵀx`.
pub fn columns_dot_into(m: &DMatrix<f64>, x: &[f64], out: &mut [f64]) {
    let rows = m.nrows();
    debug_assert_eq!(rows, x.len());
    debug_assert_eq!(m.ncols(), out.len());
    let data = m.as_slice();
    if rows * out.len() < PAR_THRESHOLD {
        for (j, o) in out.iter_mut().enumerate() {
            *o = dot(&data[j * rows..(j + 1) * rows], x);
        }
    } else {
        out.par_iter_mut()
            .enumerate()
            .with_min_len(16)
            .for_each(|(j, o)| *o = dot(&data[j * rows..(j + 1) * rows], x));
    }
}

/// `mᵀx` as a new vector.
pub fn tr_mul(m: &DMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(m.ncols());
    columns_dot_into(m, x.as_slice(), out.as_mut_slice());
    out
}

pub fn norm_inf(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Maximum absolute row sum. Dominates the spectral norm of a symmetric matrix.
pub fn inf_norm_bound(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Maximum absolute column sum.
pub fn one_norm_bound(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Power-iteration estimate of the largest eigenvalue of a symmetric PSD
/// operator. The start vector comes from a fixed-seed stream so the estimate
/// is reproducible. This is an estimate, not a bound: it approaches the
/// true value from below.
pub fn power_iteration<F>(dim: usize, iters: usize, mut apply: F) -> f64
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
{
    if dim == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e6c_736d);
    let mut v = DVector::from_fn(dim, |_, _| rng.random_range(0.5..1.5));
    let nv = v.norm();
    v /= nv;
    let mut est = 0.0;
    for _ in 0..iters {
        let w = apply(&v);
        est = v.dot(&w);
        let nw = w.norm();
        if nw == 0.0 || !nw.is_finite() {
            return est.max(0.0);
        }
        v = w / nw;
    }
    est.max(0.0)
}

/// Cholesky factorization that also reports the smallest pivot
/// (the smallest squared diagonal entry of the factor).
pub fn cholesky_with_pivot(
    m: DMatrix<f64>,
) -> Option<(nalgebra::Cholesky<f64, nalgebra::Dyn>, f64)> {
    let chol = m.cholesky()?;
    let min_pivot = chol
        .l_dirty()
        .diagonal()
        .iter()
        .map(|d| d * d)
        .fold(f64::INFINITY, f64::min);
    Some((chol, min_pivot))
}
