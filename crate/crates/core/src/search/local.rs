//! Steepest-ascent hill climbing over partitions.
//!
//! Moves: reassign one point (possibly to a new block), merge two blocks, and
//! split a block by a directional sweep in statistic space. The search starts
//! from the better of the all-singletons and one-block partitions, so it never
//! reports anything worse than those two.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::score::{score, sum_blocks};
use super::split::{candidate_directions, directional_split};
use super::{Method, SearchReport};
use crate::error::{Error, Result};
use crate::expfam::{log_marginal, Dataset, ExpFamilyModel};
use crate::partition::Partition;
use crate::prior::EppfPrior;

/// Default number of candidate evaluations.
pub const DEFAULT_BUDGET: u64 = 200_000;

struct Scorer<'a, M: ?Sized, P: ?Sized> {
    model: &'a M,
    prior: &'a P,
    data: &'a Dataset,
    cache: HashMap<Vec<usize>, f64>,
    evaluations: u64,
}

impl<M, P> Scorer<'_, M, P>
where
    M: ExpFamilyModel + ?Sized,
    P: EppfPrior + ?Sized,
{
    fn block(&mut self, idx: &[usize]) -> Result<f64> {
        if let Some(v) = self.cache.get(idx) {
            return Ok(*v);
        }
        let v = log_marginal(self.model, idx, self.data)?;
        self.cache.insert(idx.to_vec(), v);
        Ok(v)
    }

    fn score(&mut self, p: &Partition) -> Result<f64> {
        self.evaluations += 1;
        let values = p
            .blocks()
            .iter()
            .map(|b| self.block(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.prior.log_eppf(&p.sizes())? + sum_blocks(&values))
    }
}

/// Candidate partitions reachable from `current` in one move, deduplicated,
/// in a fixed order.
fn neighbours<M: ExpFamilyModel + ?Sized>(
    model: &M,
    data: &Dataset,
    current: &Partition,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Partition>> {
    let labels = current.assignment();
    let n = labels.len();
    let k = current.num_blocks();
    let sizes = current.sizes();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut push = |labels: Vec<usize>, out: &mut Vec<Partition>| -> Result<()> {
        let p = Partition::from_labels(&labels)?;
        if &p != current && seen.insert(p.clone()) {
            out.push(p);
        }
        Ok(())
    };

    for i in 0..n {
        for target in 0..=k {
            if target == labels[i] || (target == k && sizes[labels[i]] == 1) {
                continue;
            }
            let mut next = labels.to_vec();
            next[i] = target;
            push(next, &mut out)?;
        }
    }

    for a in 0..k {
        for b in a + 1..k {
            let next = labels.iter().map(|&l| if l == b { a } else { l }).collect();
            push(next, &mut out)?;
        }
    }

    for (label, block) in current.blocks().into_iter().enumerate() {
        if block.len() < 2 {
            continue;
        }
        let tvecs: Vec<Vec<f64>> = block.iter().map(|&i| model.suff_stat(data.point(i))).collect();
        for dir in candidate_directions(&tvecs, rng) {
            for size in 1..block.len() {
                let top = directional_split(&tvecs, &dir, size)?;
                let mut next = labels.to_vec();
                for pos in top {
                    next[block[pos]] = k;
                }
                debug_assert!(next.contains(&label));
                push(next, &mut out)?;
            }
        }
    }
    Ok(out)
}

/// Hill climbing from the better baseline.
///
/// `budget` caps the number of candidate-partition evaluations, the two
/// baselines included; with `budget ≤ 2` no move is tried. The result is a
/// deterministic function of the inputs and `seed`.
pub fn local_search<M, P>(model: &M, prior: &P, data: &Dataset, seed: u64, budget: u64) -> Result<SearchReport>
where
    M: ExpFamilyModel + ?Sized,
    P: EppfPrior + ?Sized,
{
    if budget == 0 {
        return Err(Error::usage("local search budget must be positive"));
    }
    let start = Instant::now();
    let n = data.n();
    let mut scorer = Scorer {
        model,
        prior,
        data,
        cache: HashMap::new(),
        evaluations: 0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let one = Partition::one_block(n);
    let singles = Partition::singletons(n);
    let one_score = scorer.score(&one)?;
    let single_score = scorer.score(&singles)?;
    // one-block wins ties: its RGS is lexicographically smaller
    let (mut current, mut current_score) = if single_score > one_score {
        (singles, single_score)
    } else {
        (one, one_score)
    };

    'climb: while scorer.evaluations < budget {
        let mut best_move: Option<(Partition, f64)> = None;
        for cand in neighbours(model, data, &current, &mut rng)? {
            if scorer.evaluations >= budget {
                break;
            }
            let s = scorer.score(&cand)?;
            if s > current_score && best_move.as_ref().is_none_or(|(_, b)| s > *b) {
                best_move = Some((cand, s));
            }
        }
        match best_move {
            Some((p, s)) => {
                current = p;
                current_score = s;
            }
            None => break 'climb,
        }
    }

    let best = score(model, prior, data, &current)?;
    debug_assert_eq!(best.log_post, current_score);
    Ok(SearchReport {
        best,
        visited: scorer.evaluations,
        method: Method::Local,
        seed,
        wall_time: start.elapsed(),
    })
}
