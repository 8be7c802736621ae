//! Exhaustive best two-way split over bitmasks.

use crate::error::{Error, Result};
use crate::search::binomial;

/// Largest number of subsets the oracle will enumerate.
pub const ORACLE_SUBSET_LIMIT: f64 = 1e6;

/// Result of [`brute_force_best_split`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSplit {
    /// Chosen elements of `U`, ascending.
    pub subset: Vec<usize>,
    pub objective: f64,
    /// Number of subsets evaluated.
    pub evaluated: u64,
}

/// Argmax over `k`-subsets `I ⊂ U` of `objective(I, U∖I)`.
///
/// Subsets are visited in bitmask order (Gosper's hack); ties are resolved
/// afterwards by comparing the sorted subsets lexicographically.
pub fn brute_force_best_split<F>(mut objective: F, universe: &[usize], k: usize) -> Result<OracleSplit>
where
    F: FnMut(&[usize], &[usize]) -> Result<f64>,
{
    let mut u = universe.to_vec();
    u.sort_unstable();
    u.dedup();
    if u.len() != universe.len() {
        return Err(Error::usage("universe contains repeated indices"));
    }
    let n = u.len();
    if k == 0 || k >= n {
        return Err(Error::usage(format!("need 1 <= k < |U|, got k = {k}, |U| = {n}")));
    }
    let count = binomial(n, k);
    if count > ORACLE_SUBSET_LIMIT || n >= 64 {
        return Err(Error::TooManySubsets {
            n,
            k,
            count,
            limit: ORACLE_SUBSET_LIMIT,
        });
    }

    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut evaluated = 0u64;
    let mut mask: u64 = (1u64 << k) - 1;
    let end = 1u64 << n;
    while mask < end {
        let (mut inside, mut outside) = (Vec::with_capacity(k), Vec::with_capacity(n - k));
        for (bit, &x) in u.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                inside.push(x);
            } else {
                outside.push(x);
            }
        }
        let value = objective(&inside, &outside)?;
        evaluated += 1;
        let better = match &best {
            None => true,
            Some((s, v)) => value > *v || (value == *v && inside < *s),
        };
        if better {
            best = Some((inside, value));
        }
        let low = mask & mask.wrapping_neg();
        let ripple = mask + low;
        mask = (((ripple ^ mask) >> 2) / low) | ripple;
    }
    let (subset, objective) = best.expect("at least one subset");
    Ok(OracleSplit {
        subset,
        objective,
        evaluated,
    })
}
