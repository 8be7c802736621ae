use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ModelSpec, NormalModel};
use crate::prior::Crp;
use crate::search::{Method, DEFAULT_BUDGET};

fn default_alpha() -> f64 {
    1.0
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

/// Everything that determines a run apart from the data.
///
/// ```json
/// {
///   "model": {"model": "niw", "mu0": [0, 0], "sigma0": 1, "kappa0": 1, "nu0": 3},
///   "alpha": 1.0,
///   "method": "exhaustive",
///   "seed": 0,
///   "budget": 200000,
///   "jitter": null
/// }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "Method::default")]
    pub method: Method,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub jitter: Option<f64>,
}

impl RunConfig {
    pub fn new(model: ModelSpec) -> Self {
        RunConfig {
            model,
            alpha: default_alpha(),
            method: Method::default(),
            seed: 0,
            budget: DEFAULT_BUDGET,
            jitter: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::usage(format!("alpha must be finite and positive, got {}", self.alpha)));
        }
        if self.budget == 0 {
            return Err(Error::usage("budget must be positive"));
        }
        if let Some(eps) = self.jitter {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::usage(format!("jitter must be finite and positive, got {eps}")));
            }
        }
        self.model.build()?;
        Ok(())
    }

    /// Checks that the model dimension matches the data.
    pub fn check_dim(&self, data_dim: usize) -> Result<()> {
        if self.model.dim() != data_dim {
            return Err(Error::usage(format!(
                "model has dimension {} but data has {} columns",
                self.model.dim(),
                data_dim
            )));
        }
        Ok(())
    }

    pub fn build_model(&self) -> Result<NormalModel> {
        self.model.build()
    }

    pub fn prior(&self) -> Result<Crp> {
        Crp::new(self.alpha)
    }
}
