//! Exact MAP partitions for conjugate Normal Bayesian mixture models, with
//! linear-separability certificates in sufficient-statistic space.

// `!(x > y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expfam;
pub mod io;
mod linalg;
pub mod models;
pub mod oracle;
pub mod partition;
pub mod prior;
pub mod sampling;
pub mod search;
pub mod separability;

pub use error::{Error, Result};
pub use expfam::{log_marginal, log_marginal_partition, posterior_params, Dataset, ExpFamilyModel, NaturalParams};
pub use models::{ModelKind, ModelSpec, NormalModel};
pub use partition::{bell, enumerate_partitions, Partition};
pub use prior::{Crp, EppfPrior, UniformPartitions};
pub use search::{find_map, Method, ScoredPartition, SearchReport};
