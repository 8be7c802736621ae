use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::expfam::Dataset;
use crate::search::{find_map, score, Method, ScoredPartition};
use crate::separability::{certify_partition, certify_t_linear, statistic_vectors, CertificateTable};

/// Hex SHA-256 of `n`, `d` and the coordinates, all little-endian.
pub fn dataset_digest(data: &Dataset) -> String {
    let mut h = Sha256::new();
    h.update((data.n() as u64).to_le_bytes());
    h.update((data.dim() as u64).to_le_bytes());
    for p in data.points() {
        for v in p {
            h.update(v.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub n: usize,
    pub d: usize,
    pub sha256: String,
}

impl DatasetInfo {
    pub fn of(data: &Dataset) -> Self {
        DatasetInfo {
            n: data.n(),
            d: data.dim(),
            sha256: dataset_digest(data),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchInfo {
    pub method: Method,
    pub seed: u64,
    pub visited: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub search_seconds: f64,
    pub certify_seconds: f64,
}

/// Output of `fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub version: String,
    pub config: RunConfig,
    pub dataset: DatasetInfo,
    pub search: SearchInfo,
    pub map: ScoredPartition,
    pub certificates: CertificateTable,
    pub all_separable: bool,
    pub timings: Timings,
}

/// Result of re-checking a record against its data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verification {
    pub digest_matches: bool,
    /// `|recomputed log_post − recorded log_post|`.
    pub score_error: f64,
    pub certificates_replay: bool,
    pub ok: bool,
}

/// Tolerance on the replayed score.
pub const SCORE_REPLAY_TOLERANCE: f64 = 1e-12;

/// Searches for the MAP partition and certifies every block pair.
pub fn fit(config: &RunConfig, data: &Dataset) -> Result<ResultRecord> {
    config.validate()?;
    config.check_dim(data.dim())?;
    let model = config.build_model()?;
    let prior = config.prior()?;
    let start = Instant::now();
    let report = find_map(&model, &prior, data, config.method, config.seed, config.budget)?;
    let search_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let certificates = certify_partition(&model, data, &report.best.partition)?;
    let certify_seconds = start.elapsed().as_secs_f64();
    Ok(ResultRecord {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        dataset: DatasetInfo::of(data),
        search: SearchInfo {
            method: report.method,
            seed: report.seed,
            visited: report.visited,
        },
        map: report.best,
        all_separable: certificates.all_separable,
        certificates,
        timings: Timings {
            search_seconds,
            certify_seconds,
        },
    })
}

impl ResultRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The record with timings zeroed, for byte-level comparisons.
    pub fn without_timings(&self) -> Self {
        ResultRecord {
            timings: Timings::default(),
            ..self.clone()
        }
    }

    /// Re-scores the recorded partition and replays every certificate.
    pub fn verify(&self, data: &Dataset) -> Result<Verification> {
        let model = self.config.build_model()?;
        let prior = self.config.prior()?;
        let partition = &self.map.partition;
        if partition.n() != data.n() {
            return Err(Error::usage("record and data sizes differ"));
        }
        let rescored = score(&model, &prior, data, partition)?;
        let score_error = (rescored.log_post - self.map.log_post).abs();

        let stats: Vec<Vec<Vec<f64>>> = partition
            .blocks()
            .iter()
            .map(|b| statistic_vectors(&model, data, b))
            .collect();
        let k = stats.len();
        let mut certificates_replay = self.certificates.pairs.len() == k * (k.saturating_sub(1)) / 2
            && self.all_separable == self.certificates.all_separable
            && self.certificates.all_separable == self.certificates.pairs.iter().all(|p| p.separable);
        for entry in &self.certificates.pairs {
            let [i, j] = entry.pair;
            if i >= j || j >= k {
                certificates_replay = false;
                continue;
            }
            let ok = match entry.certificate() {
                Some(cert) if entry.separable => cert.replays(&stats[i], &stats[j]),
                Some(_) => false,
                None => !entry.separable && !certify_t_linear(&stats[i], &stats[j])?.is_separable(),
            };
            certificates_replay &= ok;
        }
        let digest_matches = dataset_digest(data) == self.dataset.sha256;
        Ok(Verification {
            digest_matches,
            score_error,
            certificates_replay,
            ok: digest_matches && score_error <= SCORE_REPLAY_TOLERANCE && certificates_replay,
        })
    }
}
