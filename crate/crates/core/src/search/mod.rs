//! MAP partition search.

mod exhaustive;
mod local;
mod score;
mod split;

use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use exhaustive::{exhaustive_map, exhaustive_map_with_cap, NEAR_TIE};
pub use local::{local_search, DEFAULT_BUDGET};
pub use score::{score, ScoredPartition};
pub use split::{
    best_split, best_split_with_limits, binomial, candidate_directions, directional_split, split_objective,
    Split, SPLIT_BRUTE_FORCE_CAP, SPLIT_SUBSET_LIMIT,
};

use crate::error::Result;
use crate::expfam::{Dataset, ExpFamilyModel};
use crate::prior::EppfPrior;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Exhaustive,
    Local,
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub best: ScoredPartition,
    /// Partitions scored (exhaustive) or candidate evaluations (local).
    pub visited: u64,
    pub method: Method,
    pub seed: u64,
    pub wall_time: Duration,
}

/// Runs the requested search method.
pub fn find_map<M, P>(model: &M, prior: &P, data: &Dataset, method: Method, seed: u64, budget: u64) -> Result<SearchReport>
where
    M: ExpFamilyModel + ?Sized,
    P: EppfPrior + ?Sized,
{
    match method {
        Method::Exhaustive => exhaustive_map(model, prior, data),
        Method::Local => local_search(model, prior, data, seed, budget),
    }
}
