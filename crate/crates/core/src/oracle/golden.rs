//! Frozen reference values for one-dimensional marginal likelihoods.

use serde::{Deserialize, Serialize};

use super::marginal::quadrature_log_marginal;
use super::quadrature::QuadratureSpec;
use crate::error::Result;
use crate::expfam::{log_marginal, Dataset};
use crate::models::ModelSpec;

/// The fixture file shipped with the crate.
pub const BUNDLED_FIXTURES: &str = include_str!("../../fixtures/golden.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenCase {
    pub name: String,
    pub model: ModelSpec,
    pub points: Vec<f64>,
    /// `ln f_k(points)` as produced by the quadrature oracle.
    pub log_marginal: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoldenFixtures {
    /// Oracle settings the values were produced with.
    pub oracle: QuadratureSpec,
    pub cases: Vec<GoldenCase>,
}

impl GoldenFixtures {
    pub fn bundled() -> Result<Self> {
        Self::from_json(BUNDLED_FIXTURES)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Recomputes every value with the oracle.
    pub fn regenerate(&self) -> Result<GoldenFixtures> {
        let cases = self
            .cases
            .iter()
            .map(|c| {
                Ok(GoldenCase {
                    log_marginal: quadrature_log_marginal(&c.model, &c.points, &self.oracle)?.value,
                    ..c.clone()
                })
            })
            .collect::<Result<_>>()?;
        Ok(GoldenFixtures {
            oracle: self.oracle,
            cases,
        })
    }
}

/// Outcome of re-deriving one fixture.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenCheck {
    pub name: String,
    pub frozen: f64,
    pub oracle: f64,
    pub oracle_error: f64,
    pub closed_form: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Re-runs the oracle and the closed form on every case and compares both
/// with the frozen value.
pub fn check_fixtures(fixtures: &GoldenFixtures) -> Result<Vec<GoldenCheck>> {
    fixtures
        .cases
        .iter()
        .map(|c| {
            let est = quadrature_log_marginal(&c.model, &c.points, &fixtures.oracle)?;
            let model = c.model.build()?;
            let data = Dataset::new(c.points.iter().map(|&x| vec![x]).collect())?;
            let idx: Vec<usize> = (0..c.points.len()).collect();
            let closed_form = log_marginal(&model, &idx, &data)?;
            let pass = (est.value - c.log_marginal).abs() <= c.tolerance
                && (closed_form - c.log_marginal).abs() <= c.tolerance;
            Ok(GoldenCheck {
                name: c.name.clone(),
                frozen: c.log_marginal,
                oracle: est.value,
                oracle_error: est.error,
                closed_form,
                tolerance: c.tolerance,
                pass,
            })
        })
        .collect()
}
