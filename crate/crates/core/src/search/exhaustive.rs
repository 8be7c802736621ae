use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;

use super::score::{sum_blocks, ScoredPartition};
use super::{Method, SearchReport};
use crate::error::Result;
use crate::expfam::{log_marginal, Dataset, ExpFamilyModel};
use crate::partition::{self, bell, Partition, RgsIter};
use crate::prior::EppfPrior;

/// Scores within this distance of the best are reported as co-optimal.
pub const NEAR_TIE: f64 = 1e-9;

const TIE_SET_LIMIT: usize = 64;
const PREFIX_LEN: usize = 5;

#[derive(Debug, Clone)]
struct Candidate {
    score: f64,
    rgs: Vec<usize>,
}

/// `a` beats `b`: higher score, then lexicographically smaller RGS.
fn better(a: &Candidate, b: &Candidate) -> bool {
    match a.score.total_cmp(&b.score) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.rgs < b.rgs,
    }
}

#[derive(Debug, Default)]
struct ChunkResult {
    best: Option<Candidate>,
    near: Vec<Candidate>,
}

impl ChunkResult {
    fn offer(&mut self, cand: Candidate) {
        match &self.best {
            Some(b) if !better(&cand, b) => {
                if cand.score >= b.score - NEAR_TIE && self.near.len() < 4 * TIE_SET_LIMIT {
                    self.near.push(cand);
                }
            }
            _ => {
                if let Some(old) = self.best.take() {
                    self.near.push(old);
                }
                let floor = cand.score - NEAR_TIE;
                self.near.retain(|c| c.score >= floor);
                self.best = Some(cand);
            }
        }
    }

    fn merge(mut self, other: ChunkResult) -> ChunkResult {
        if let Some(b) = other.best {
            self.offer(b);
        }
        for c in other.near {
            self.offer(c);
        }
        self
    }
}

/// Global MAP by enumerating every partition of `[n]`.
///
/// Block log-marginals are precomputed for all `2^n − 1` subsets, then the
/// restricted-growth-string stream is split by prefix across threads. The
/// reduction is a total order (score, then RGS) so the answer does not depend
/// on scheduling.
pub fn exhaustive_map<M, P>(model: &M, prior: &P, data: &Dataset) -> Result<SearchReport>
where
    M: ExpFamilyModel + ?Sized,
    P: EppfPrior + ?Sized,
{
    exhaustive_map_with_cap(model, prior, data, partition::DEFAULT_ENUMERATION_CAP)
}

pub fn exhaustive_map_with_cap<M, P>(model: &M, prior: &P, data: &Dataset, cap: usize) -> Result<SearchReport>
where
    M: ExpFamilyModel + ?Sized,
    P: EppfPrior + ?Sized,
{
    let start = Instant::now();
    let n = data.n();
    partition::check_cap(n, cap)?;

    let block_values: Vec<f64> = (1usize..1 << n)
        .into_par_iter()
        .map(|mask| {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            log_marginal(model, &idx, data)
        })
        .collect::<Result<_>>()?;
    let block_value = |mask: usize| block_values[mask - 1];

    let prefixes = partition::rgs_prefixes(n.min(PREFIX_LEN));
    let chunks: Vec<ChunkResult> = prefixes
        .par_iter()
        .map(|prefix| -> Result<ChunkResult> {
            let mut chunk = ChunkResult::default();
            let mut masks = Vec::with_capacity(n);
            let mut sizes = Vec::with_capacity(n);
            let mut values = Vec::with_capacity(n);
            for rgs in RgsIter::with_prefix(prefix, n) {
                masks.clear();
                for (i, &l) in rgs.iter().enumerate() {
                    if l == masks.len() {
                        masks.push(0usize);
                    }
                    masks[l] |= 1 << i;
                }
                sizes.clear();
                sizes.extend(masks.iter().map(|m| m.count_ones() as usize));
                values.clear();
                values.extend(masks.iter().map(|&m| block_value(m)));
                let log_prior = prior.log_eppf(&sizes)?;
                let score = log_prior + sum_blocks(&values);
                chunk.offer(Candidate { score, rgs });
            }
            Ok(chunk)
        })
        .collect::<Result<_>>()?;

    let merged = chunks.into_iter().fold(ChunkResult::default(), ChunkResult::merge);
    let best = merged.best.expect("at least one partition");
    let mut near: Vec<Candidate> = merged
        .near
        .into_iter()
        .filter(|c| c.score >= best.score - NEAR_TIE && c.rgs != best.rgs)
        .collect();
    near.sort_by(|a, b| a.rgs.cmp(&b.rgs));
    near.dedup_by(|a, b| a.rgs == b.rgs);
    near.truncate(TIE_SET_LIMIT);

    let best_partition = Partition::from_labels(&best.rgs)?;
    let blocks = best_partition.blocks();
    let values: Vec<f64> = blocks
        .iter()
        .map(|b| block_value(b.iter().fold(0, |m, &i| m | 1 << i)))
        .collect();
    let log_prior = prior.log_eppf(&best_partition.sizes())?;
    let mut scored = ScoredPartition::assemble(best_partition, log_prior, &values);
    if !near.is_empty() {
        scored.tie_set = Some(
            near.iter()
                .map(|c| Partition::from_labels(&c.rgs))
                .collect::<Result<_>>()?,
        );
    }
    Ok(SearchReport {
        best: scored,
        visited: bell(n) as u64,
        method: Method::Exhaustive,
        seed: 0,
        wall_time: start.elapsed(),
    })
}
