//! Two-way splits of a set of points.
//!
//! [`best_split`] is the exact argmax over `k`-subsets of
//! `ln f_k(x_I) + ln f_l(x_{U∖I})`. Because the log-partition is strictly
//! convex, that argmax is always cut off from its complement by a hyperplane
//! in statistic space, so the top-`k` points along some direction recover it;
//! [`directional_split`] is that sweep.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::expfam::{log_marginal, Dataset, ExpFamilyModel};

/// Default bound on `|U|` for [`best_split`].
pub const SPLIT_BRUTE_FORCE_CAP: usize = 20;
/// Default bound on the number of `k`-subsets examined.
pub const SPLIT_SUBSET_LIMIT: f64 = 1e6;

const MAX_DIRECTIONS: usize = 500;
const PAIRWISE_LIMIT: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    /// The chosen `k` indices, ascending.
    pub subset: Vec<usize>,
    /// The remaining indices, ascending.
    pub complement: Vec<usize>,
    /// `ln f_k(x_subset) + ln f_l(x_complement)`.
    pub objective: f64,
}

pub fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `ln f_k(x_I) + ln f_l(x_J)`.
pub fn split_objective<M: ExpFamilyModel + ?Sized>(
    model: &M,
    data: &Dataset,
    subset: &[usize],
    complement: &[usize],
) -> Result<f64> {
    Ok(log_marginal(model, subset, data)? + log_marginal(model, complement, data)?)
}

/// Exact best `k`-subset of `universe` by brute force; ties go to the
/// lexicographically smallest subset.
pub fn best_split<M: ExpFamilyModel + ?Sized>(
    model: &M,
    universe: &[usize],
    k: usize,
    data: &Dataset,
) -> Result<Split> {
    best_split_with_limits(model, universe, k, data, SPLIT_BRUTE_FORCE_CAP, SPLIT_SUBSET_LIMIT)
}

pub fn best_split_with_limits<M: ExpFamilyModel + ?Sized>(
    model: &M,
    universe: &[usize],
    k: usize,
    data: &Dataset,
    cap: usize,
    subset_limit: f64,
) -> Result<Split> {
    let mut u = universe.to_vec();
    u.sort_unstable();
    if u.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::usage("universe contains repeated indices"));
    }
    let size = u.len();
    if k == 0 || k >= size {
        return Err(Error::usage(format!("need 1 <= k < |U|, got k = {k}, |U| = {size}")));
    }
    let count = binomial(size, k);
    if size > cap || count > subset_limit {
        return Err(Error::TooManySubsets {
            n: size,
            k,
            count,
            limit: subset_limit,
        });
    }

    let mut best: Option<Split> = None;
    let mut pos: Vec<usize> = (0..k).collect();
    let mut subset = Vec::with_capacity(k);
    let mut complement = Vec::with_capacity(size - k);
    loop {
        subset.clear();
        complement.clear();
        let mut next = 0;
        for (i, &x) in u.iter().enumerate() {
            if next < k && pos[next] == i {
                subset.push(x);
                next += 1;
            } else {
                complement.push(x);
            }
        }
        let objective = split_objective(model, data, &subset, &complement)?;
        if best.as_ref().is_none_or(|b| objective > b.objective) {
            best = Some(Split {
                subset: subset.clone(),
                complement: complement.clone(),
                objective,
            });
        }
        // next k-combination in lexicographic order
        let Some(i) = (0..k).rev().find(|&i| pos[i] < size - k + i) else {
            break;
        };
        pos[i] += 1;
        for j in i + 1..k {
            pos[j] = pos[j - 1] + 1;
        }
    }
    Ok(best.expect("at least one subset"))
}

fn projections(tvecs: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    tvecs
        .iter()
        .map(|t| t.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn all_distinct(values: &[f64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).all(|w| w[0] != w[1])
}

/// Positions of the `k` vectors with the largest `⟨t, v⟩`, ascending.
///
/// If projections tie, `v` is nudged along a fixed irrational-ish direction
/// with growing step until they separate; exact duplicates fall back to
/// position order.
pub fn directional_split(tvecs: &[Vec<f64>], v: &[f64], k: usize) -> Result<Vec<usize>> {
    let m = tvecs.len();
    if k == 0 || k >= m {
        return Err(Error::usage(format!("need 1 <= k < {m}, got {k}")));
    }
    if tvecs.iter().any(|t| t.len() != v.len()) {
        return Err(Error::usage("direction and statistic vectors differ in length"));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let mut dir = v.to_vec();
    let mut proj = projections(tvecs, &dir);
    let mut step = 1e-9 * norm;
    while !all_distinct(&proj) && step < norm {
        dir = v
            .iter()
            .enumerate()
            .map(|(j, x)| x + step * (2.0 + j as f64).sqrt().fract().max(0.1))
            .collect();
        proj = projections(tvecs, &dir);
        step *= 16.0;
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| proj[b].total_cmp(&proj[a]).then(a.cmp(&b)));
    let mut top = order[..k].to_vec();
    top.sort_unstable();
    Ok(top)
}

/// Candidate sweep directions: `2p` random unit vectors plus, when there are
/// at most 30 vectors, every normalized pairwise difference; at most 500.
pub fn candidate_directions<R: Rng + ?Sized>(tvecs: &[Vec<f64>], rng: &mut R) -> Vec<Vec<f64>> {
    let p = tvecs.first().map_or(0, Vec::len);
    if p == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for _ in 0..2 * p {
        let g: Vec<f64> = (0..p).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        if let Some(u) = normalized(g) {
            out.push(u);
        }
    }
    if tvecs.len() <= PAIRWISE_LIMIT {
        'outer: for i in 0..tvecs.len() {
            for j in i + 1..tvecs.len() {
                if out.len() >= MAX_DIRECTIONS {
                    break 'outer;
                }
                let diff = tvecs[i].iter().zip(&tvecs[j]).map(|(a, b)| a - b).collect();
                if let Some(u) = normalized(diff) {
                    out.push(u);
                }
            }
        }
    }
    out.truncate(MAX_DIRECTIONS);
    out
}

fn normalized(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelKind, ModelSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_candidates() {
        let m = ModelSpec::isotropic(ModelKind::Fixed, 1, 1.0, 1.0, 1.0).build().unwrap();
        let data = Dataset::new(vec![vec![0.0], vec![3.0]]).unwrap();
        let s = best_split(&m, &[0, 1], 1, &data).unwrap();
        let a = split_objective(&m, &data, &[0], &[1]).unwrap();
        let b = split_objective(&m, &data, &[1], &[0]).unwrap();
        assert_eq!(s.objective, a.max(b));
    }

    #[test]
    fn separates_two_tight_pairs() {
        let m = ModelSpec::isotropic(ModelKind::Fixed, 1, 0.5, 50.0, 1.0).build().unwrap();
        let data = Dataset::new(vec![vec![0.0], vec![0.1], vec![10.0], vec![10.1]]).unwrap();
        let s = best_split(&m, &[0, 1, 2, 3], 2, &data).unwrap();
        assert_eq!(s.subset, vec![0, 1]);
        assert_eq!(s.complement, vec![2, 3]);
    }

    #[test]
    fn guards() {
        let m = ModelSpec::isotropic(ModelKind::Fixed, 1, 1.0, 1.0, 1.0).build().unwrap();
        let data = Dataset::new((0..25).map(|i| vec![i as f64]).collect()).unwrap();
        let all: Vec<usize> = (0..25).collect();
        assert!(matches!(best_split(&m, &all, 3, &data), Err(Error::TooManySubsets { .. })));
        assert!(matches!(best_split(&m, &all[..4], 0, &data), Err(Error::Usage(_))));
        assert!(matches!(best_split(&m, &all[..4], 4, &data), Err(Error::Usage(_))));
        assert!(matches!(
            best_split_with_limits(&m, &all[..12], 6, &data, 20, 100.0),
            Err(Error::TooManySubsets { .. })
        ));
    }

    #[test]
    fn directional_examples() {
        let t = vec![vec![3.0, 0.0], vec![-1.0, 5.0], vec![2.0, 9.0], vec![0.5, -2.0]];
        assert_eq!(directional_split(&t, &[1.0, 0.0], 2).unwrap(), vec![0, 2]);
        let k = t.len() - 1;
        let fwd = directional_split(&t, &[0.3, 0.7], k).unwrap();
        let back = directional_split(&t, &[-0.3, -0.7], k).unwrap();
        // top-(m−1) along v and along −v leave out opposite extremes
        let missing = |s: &[usize]| (0..4).find(|i| !s.contains(i)).unwrap();
        assert_ne!(missing(&fwd), missing(&back));
        assert!(directional_split(&t, &[1.0], 1).is_err());
        assert!(directional_split(&t, &[1.0, 0.0], 4).is_err());
    }

    #[test]
    fn ties_are_broken_by_perturbation() {
        let t = vec![vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 0.0]];
        // projections on e1 tie between 0 and 1; the nudge adds a positive e2 part
        assert_eq!(directional_split(&t, &[1.0, 0.0], 1).unwrap(), vec![1]);
        let dup = vec![vec![1.0], vec![1.0], vec![0.0]];
        assert_eq!(directional_split(&dup, &[1.0], 1).unwrap(), vec![0]);
    }

    #[test]
    fn direction_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let dirs = candidate_directions(&t, &mut rng);
        assert_eq!(dirs.len(), 4 + 45);
        let many: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64]).collect();
        assert_eq!(candidate_directions(&many, &mut rng).len(), 2);
        for d in dirs {
            assert!((d.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
