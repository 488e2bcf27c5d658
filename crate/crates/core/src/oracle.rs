//! Exact lasso solutions for small instances by sign-pattern enumeration.
//!
//! For each `s ∈ {−1, 0, +1}^l` with support `S`, the candidate solves the
//! restricted normal equations `A_SᵀA_S x_S = (Aᵀb)_S − λ s_S` and is kept if
//! its signs match `s` and every inactive coordinate satisfies
//! `|A_jᵀ(b − Ax)| ≤ λ`. Those are exactly the subgradient optimality
//! conditions, so any accepted candidate is a global minimizer.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{primal_objective, GramCache, ProblemInstance, SINGULAR_PIVOT_RATIO};

/// `3^12 = 531 441` patterns is still a seconds-scale enumeration.
pub const ORACLE_MAX_COLUMNS: usize = 12;

/// Slack on the inactive-coordinate inequality.
const INACTIVE_SLACK: f64 = 1e-10;

/// Pattern `index` in base 3, most significant digit first; digit `d`
/// maps to sign `d − 1`, so index order is lexicographic order on `s`.
fn decode(mut index: usize, l: usize, signs: &mut [i8]) {
    for slot in signs[..l].iter_mut().rev() {
        *slot = (index % 3) as i8 - 1;
        index /= 3;
    }
}

fn candidate(
    inst: &ProblemInstance,
    gram: &DMatrix<f64>,
    atb: &DVector<f64>,
    pivot_floor: f64,
    signs: &[i8],
) -> Option<DVector<f64>> {
    let l = signs.len();
    let lambda = inst.lambda();
    let support: Vec<usize> = (0..l).filter(|&i| signs[i] != 0).collect();
    let mut x = DVector::zeros(l);

    if !support.is_empty() {
        let k = support.len();
        let sub = DMatrix::from_fn(k, k, |r, c| gram[(support[r], support[c])]);
        let rhs = DVector::from_fn(k, |r, _| {
            atb[support[r]] - lambda * f64::from(signs[support[r]])
        });
        let (chol, pivot) = linalg::cholesky_with_pivot(sub)?;
        if !(pivot > pivot_floor) {
            return None;
        }
        let xs = chol.solve(&rhs);
        for (r, &i) in support.iter().enumerate() {
            if !(xs[r] * f64::from(signs[i]) > 0.0) {
                return None;
            }
            x[i] = xs[r];
        }
    }

    for j in (0..l).filter(|&j| signs[j] == 0) {
        let gx: f64 = support.iter().map(|&i| gram[(j, i)] * x[i]).sum();
        if (atb[j] - gx).abs() > lambda + INACTIVE_SLACK {
            return None;
        }
    }
    Some(x)
}

/// Exact solution by enumerating all `3^l` sign patterns (`l ≤ 12`).
///
/// Patterns whose restricted Gram is singular are skipped. Among accepted
/// candidates the smallest primal objective wins, ties going to the
/// lexicographically smallest pattern, so the result does not depend on
/// how the enumeration is scheduled across threads.
pub fn sign_pattern_oracle(inst: &ProblemInstance, cache: &GramCache) -> Result<DVector<f64>> {
    let l = inst.cols();
    if l > ORACLE_MAX_COLUMNS {
        return Err(Error::OracleTooLarge {
            max: ORACLE_MAX_COLUMNS,
            found: l,
        });
    }
    let gram = cache.gram_matrix();
    let gram: &DMatrix<f64> = &gram;
    let atb = cache.atb();
    let pivot_floor = SINGULAR_PIVOT_RATIO * cache.gram_norm_ub();
    let total = 3usize.pow(l as u32);

    let best = (0..total)
        .into_par_iter()
        .with_min_len(64)
        .filter_map(|index| {
            let mut signs = [0i8; ORACLE_MAX_COLUMNS];
            decode(index, l, &mut signs);
            let x = candidate(inst, gram, atb, pivot_floor, &signs[..l])?;
            Some((primal_objective(inst, &x), index, x))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    best.map(|(_, _, x)| x).ok_or(Error::OracleInconclusive)
}
