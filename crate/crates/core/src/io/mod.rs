//! Configuration, CSV data, synthetic generation and result records.

mod config;
mod dataset;
mod generate;
mod record;

pub use config::RunConfig;
pub use dataset::{load_dataset, read_dataset, write_dataset};
pub use generate::{crp_seating, generate, Generated};
pub use record::{dataset_digest, fit, DatasetInfo, ResultRecord, SearchInfo, Timings, Verification, SCORE_REPLAY_TOLERANCE};
