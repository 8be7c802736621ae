use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expfam::{log_marginal, Dataset, ExpFamilyModel};
use crate::partition::Partition;
use crate::prior::EppfPrior;

/// A partition with its log-prior, log-likelihood and their sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPartition {
    pub partition: Partition,
    pub log_prior: f64,
    pub log_lik: f64,
    pub log_post: f64,
    /// Other partitions whose score is within the near-tie threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie_set: Option<Vec<Partition>>,
}

impl ScoredPartition {
    /// Sums block values left to right; every scorer in the crate goes
    /// through here so equal partitions get bit-identical scores.
    pub(crate) fn assemble(partition: Partition, log_prior: f64, block_values: &[f64]) -> Self {
        let log_lik = sum_blocks(block_values);
        ScoredPartition {
            partition,
            log_prior,
            log_lik,
            log_post: log_prior + log_lik,
            tie_set: None,
        }
    }
}

pub(crate) fn sum_blocks(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc + v)
}

/// `ln p_n(partition) + Σ_I ln f_{|I|}(x_I)`, blocks in canonical order.
pub fn score<M, P>(model: &M, prior: &P, data: &Dataset, partition: &Partition) -> Result<ScoredPartition>
where
    M: ExpFamilyModel + ?Sized,
    P: EppfPrior + ?Sized,
{
    if partition.n() != data.n() {
        return Err(Error::usage(format!(
            "partition has {} items but data has {} points",
            partition.n(),
            data.n()
        )));
    }
    let values = partition
        .blocks()
        .iter()
        .map(|b| log_marginal(model, b, data))
        .collect::<Result<Vec<_>>>()?;
    let log_prior = prior.log_eppf(&partition.sizes())?;
    Ok(ScoredPartition::assemble(partition.clone(), log_prior, &values))
}
