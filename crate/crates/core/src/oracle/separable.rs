//! Combinatorial strict-separability test, independent of the LP.
//!
//! Finite sets `X`, `Y` in `ℝ^p` are strictly separated by an affine function
//! exactly when the origin is outside the convex hull of `{(x, 1)} ∪
//! {−(y, 1)}`. By Carathéodory, if the origin is inside, it is inside the
//! hull of some affinely independent subset of at most `p + 2` of those
//! points, where the barycentric weights are unique and can be solved for.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::search::binomial;

const SUBSET_LIMIT: f64 = 1e6;

fn standardized(tx: &[Vec<f64>], ty: &[Vec<f64>]) -> Vec<DVector<f64>> {
    let p = tx[0].len();
    let all: Vec<&Vec<f64>> = tx.iter().chain(ty).collect();
    let n = all.len() as f64;
    let mut lifted = Vec::with_capacity(all.len());
    let centre: Vec<f64> = (0..p).map(|j| all.iter().map(|t| t[j]).sum::<f64>() / n).collect();
    let spread: Vec<f64> = (0..p)
        .map(|j| {
            let s = (all.iter().map(|t| (t[j] - centre[j]).powi(2)).sum::<f64>() / n).sqrt();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    for (i, t) in all.iter().enumerate() {
        let sign = if i < tx.len() { 1.0 } else { -1.0 };
        lifted.push(DVector::from_fn(p + 1, |j, _| {
            sign * if j < p { (t[j] - centre[j]) / spread[j] } else { 1.0 }
        }));
    }
    lifted
}

/// Whether the origin is a convex combination of `cols` (assumed at most
/// `dim + 1` of them), ignoring affinely dependent subsets.
fn origin_in_simplex(cols: &[&DVector<f64>]) -> bool {
    let rows = cols[0].len() + 1;
    let r = cols.len();
    let m = DMatrix::from_fn(rows, r, |i, j| if i + 1 < rows { cols[j][i] } else { 1.0 });
    let svd = m.clone().svd(true, true);
    let top = svd.singular_values.max();
    if svd.singular_values.iter().any(|&s| s <= 1e-10 * top) {
        return false;
    }
    let mut rhs = DVector::zeros(rows);
    rhs[rows - 1] = 1.0;
    let Ok(weights) = svd.solve(&rhs, 1e-14) else {
        return false;
    };
    let residual = (&m * &weights - &rhs).norm();
    residual < 1e-9 && weights.iter().all(|&w| w >= -1e-10)
}

/// `true` when some `a·t + b` is positive on all of `tx` and negative on all
/// of `ty`, decided by exhaustive search over Carathéodory subsets.
pub fn brute_force_separable(tx: &[Vec<f64>], ty: &[Vec<f64>]) -> Result<bool> {
    if tx.is_empty() || ty.is_empty() {
        return Err(Error::usage("both point sets must be non-empty"));
    }
    let p = tx[0].len();
    if tx.iter().chain(ty).any(|t| t.len() != p) {
        return Err(Error::usage("statistic vectors differ in length"));
    }
    let points = standardized(tx, ty);
    let n = points.len();
    let max_size = (p + 2).min(n);
    let total: f64 = (1..=max_size).map(|r| binomial(n, r)).sum();
    if total > SUBSET_LIMIT {
        return Err(Error::TooManySubsets {
            n,
            k: max_size,
            count: total,
            limit: SUBSET_LIMIT,
        });
    }
    for r in 2..=max_size {
        let mut pos: Vec<usize> = (0..r).collect();
        loop {
            // a subset drawn from one side only has last coordinate ±1 throughout
            let mixed = pos.iter().any(|&i| i < tx.len()) && pos.iter().any(|&i| i >= tx.len());
            if mixed {
                let cols: Vec<&DVector<f64>> = pos.iter().map(|&i| &points[i]).collect();
                if origin_in_simplex(&cols) {
                    return Ok(false);
                }
            }
            let Some(i) = (0..r).rev().find(|&i| pos[i] < n - r + i) else {
                break;
            };
            pos[i] += 1;
            for j in i + 1..r {
                pos[j] = pos[j - 1] + 1;
            }
        }
    }
    Ok(true)
}
