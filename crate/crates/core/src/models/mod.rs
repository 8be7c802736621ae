//! The three Normal conjugate models and their hyperparameter files.

pub mod fixed;
pub mod nig;
pub mod niw;
pub mod special;
pub mod sym;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use fixed::{FixedCovModel, FixedCovSpec, FixedDecoded};
pub use nig::{NigDecoded, NigModel, NigSpec};
pub use niw::{NiwDecoded, NiwModel, NiwSpec};
pub use special::log_mvgamma;
pub use sym::{sym_pack, sym_unpack, SymVec};

use crate::error::{Error, Result};
use crate::expfam::{ExpFamilyModel, NaturalParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Niw,
    Fixed,
    Nig,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Niw, ModelKind::Fixed, ModelKind::Nig];
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Niw => "niw",
            ModelKind::Fixed => "fixed",
            ModelKind::Nig => "nig",
        })
    }
}

/// A covariance hyperparameter: a full matrix or a scalar times the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixParam {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

impl MatrixParam {
    pub fn to_matrix(&self, d: usize, what: &str) -> Result<DMatrix<f64>> {
        match self {
            MatrixParam::Scalar(s) => Ok(DMatrix::identity(d, d) * *s),
            MatrixParam::Matrix(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::usage(format!("{what} must be a {d}x{d} matrix")));
                }
                Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
            }
        }
    }

    fn from_matrix(m: &DMatrix<f64>) -> Self {
        MatrixParam::Matrix(m.row_iter().map(|r| r.iter().copied().collect()).collect())
    }
}

/// Hyperparameter file contents, tagged by `"model"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Niw {
        mu0: Vec<f64>,
        sigma0: MatrixParam,
        kappa0: f64,
        nu0: f64,
    },
    Fixed {
        mu0: Vec<f64>,
        psi0: MatrixParam,
        sigma0: MatrixParam,
    },
    Nig {
        mu0: Vec<f64>,
        psi0: MatrixParam,
        sigma0: MatrixParam,
        beta0: f64,
    },
}

impl ModelSpec {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelSpec::Niw { .. } => ModelKind::Niw,
            ModelSpec::Fixed { .. } => ModelKind::Fixed,
            ModelSpec::Nig { .. } => ModelKind::Nig,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::Niw { mu0, .. } | ModelSpec::Fixed { mu0, .. } | ModelSpec::Nig { mu0, .. } => {
                mu0.len()
            }
        }
    }

    /// Parses a hyperparameter file. When `kind` is given, a file without a
    /// `"model"` tag is read as that model; a conflicting tag is an error.
    pub fn from_json(text: &str, kind: Option<ModelKind>) -> Result<Self> {
        let mut value: serde_json::Value = serde_json::from_str(text)?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| Error::usage("hyperparameter file must hold a JSON object"))?;
        match (obj.get("model").and_then(|m| m.as_str()), kind) {
            (Some(tag), Some(k)) if tag != k.to_string() => {
                return Err(Error::usage(format!(
                    "hyperparameter file is for model {tag:?} but --model is {k}"
                )))
            }
            (None, Some(k)) => {
                obj.insert("model".into(), serde_json::Value::String(k.to_string()));
            }
            (None, None) => return Err(Error::usage("model kind not given")),
            _ => {}
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn build(&self) -> Result<NormalModel> {
        let mu = |v: &Vec<f64>| DVector::from_column_slice(v);
        Ok(match self {
            ModelSpec::Niw {
                mu0,
                sigma0,
                kappa0,
                nu0,
            } => NormalModel::Niw(NiwModel::new(NiwSpec {
                mu0: mu(mu0),
                sigma0: sigma0.to_matrix(mu0.len(), "sigma0")?,
                kappa0: *kappa0,
                nu0: *nu0,
            })?),
            ModelSpec::Fixed { mu0, psi0, sigma0 } => NormalModel::Fixed(FixedCovModel::new(FixedCovSpec {
                mu0: mu(mu0),
                psi0: psi0.to_matrix(mu0.len(), "psi0")?,
                sigma0: sigma0.to_matrix(mu0.len(), "sigma0")?,
            })?),
            ModelSpec::Nig {
                mu0,
                psi0,
                sigma0,
                beta0,
            } => NormalModel::Nig(NigModel::new(NigSpec {
                mu0: mu(mu0),
                psi0: psi0.to_matrix(mu0.len(), "psi0")?,
                sigma0: sigma0.to_matrix(mu0.len(), "sigma0")?,
                beta0: *beta0,
            })?),
        })
    }

    /// Scalar-covariance spec with `μ₀ = 0`, handy in tests and examples.
    pub fn isotropic(kind: ModelKind, d: usize, sigma0: f64, psi0: f64, strength: f64) -> Self {
        let mu0 = vec![0.0; d];
        match kind {
            ModelKind::Niw => ModelSpec::Niw {
                mu0,
                sigma0: MatrixParam::Scalar(sigma0),
                kappa0: sigma0 / psi0,
                nu0: strength,
            },
            ModelKind::Fixed => ModelSpec::Fixed {
                mu0,
                psi0: MatrixParam::Scalar(psi0),
                sigma0: MatrixParam::Scalar(sigma0),
            },
            ModelKind::Nig => ModelSpec::Nig {
                mu0,
                psi0: MatrixParam::Scalar(psi0),
                sigma0: MatrixParam::Scalar(sigma0),
                beta0: strength,
            },
        }
    }
}

/// One of the three shipped models behind a single type.
#[derive(Debug, Clone)]
pub enum NormalModel {
    Niw(NiwModel),
    Fixed(FixedCovModel),
    Nig(NigModel),
}

macro_rules! dispatch {
    ($self:expr, $m:ident => $body:expr) => {
        match $self {
            NormalModel::Niw($m) => $body,
            NormalModel::Fixed($m) => $body,
            NormalModel::Nig($m) => $body,
        }
    };
}

impl NormalModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            NormalModel::Niw(_) => ModelKind::Niw,
            NormalModel::Fixed(_) => ModelKind::Fixed,
            NormalModel::Nig(_) => ModelKind::Nig,
        }
    }

    /// The spec this model was built from, in file form.
    pub fn to_spec(&self) -> ModelSpec {
        let v = |x: &DVector<f64>| x.iter().copied().collect::<Vec<_>>();
        match self {
            NormalModel::Niw(m) => ModelSpec::Niw {
                mu0: v(&m.spec().mu0),
                sigma0: MatrixParam::from_matrix(&m.spec().sigma0),
                kappa0: m.spec().kappa0,
                nu0: m.spec().nu0,
            },
            NormalModel::Fixed(m) => ModelSpec::Fixed {
                mu0: v(&m.spec().mu0),
                psi0: MatrixParam::from_matrix(&m.spec().psi0),
                sigma0: MatrixParam::from_matrix(&m.spec().sigma0),
            },
            NormalModel::Nig(m) => ModelSpec::Nig {
                mu0: v(&m.spec().mu0),
                psi0: MatrixParam::from_matrix(&m.spec().psi0),
                sigma0: MatrixParam::from_matrix(&m.spec().sigma0),
                beta0: m.spec().beta0,
            },
        }
    }
}

impl ExpFamilyModel for NormalModel {
    fn dim(&self) -> usize {
        dispatch!(self, m => m.dim())
    }
    fn stat_dim(&self) -> usize {
        dispatch!(self, m => m.stat_dim())
    }
    fn tau_dim(&self) -> usize {
        dispatch!(self, m => m.tau_dim())
    }
    fn suff_stat_into(&self, x: &[f64], out: &mut [f64]) {
        dispatch!(self, m => m.suff_stat_into(x, out))
    }
    fn log_h(&self, x: &[f64]) -> f64 {
        dispatch!(self, m => m.log_h(x))
    }
    fn tau_increment(&self) -> &[f64] {
        dispatch!(self, m => m.tau_increment())
    }
    fn prior(&self) -> &NaturalParams {
        dispatch!(self, m => m.prior())
    }
    fn log_partition_prior(&self) -> f64 {
        dispatch!(self, m => m.log_partition_prior())
    }
    fn log_partition(&self, params: &NaturalParams) -> Result<f64> {
        dispatch!(self, m => m.log_partition(params))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_dimensions() {
        for d in 1..=4 {
            let p = |k| ModelSpec::isotropic(k, d, 1.0, 1.0, 3.0).build().unwrap().stat_dim();
            assert_eq!(p(ModelKind::Niw), d * (d + 3) / 2);
            assert_eq!(p(ModelKind::Fixed), d);
            assert_eq!(p(ModelKind::Nig), d + 1);
        }
    }

    #[test]
    fn prior_is_admissible_for_every_model() {
        for kind in ModelKind::ALL {
            let m = ModelSpec::isotropic(kind, 2, 0.5, 2.0, 4.0).build().unwrap();
            assert!(m.in_domain(m.prior()));
            assert!(m.log_partition_prior().is_finite());
        }
    }

    #[test]
    fn parses_scalar_and_matrix_forms() {
        let s = ModelSpec::from_json(r#"{"mu0":[0,0],"psi0":2,"sigma0":[[1,0.5],[0.5,1]]}"#, Some(ModelKind::Fixed))
            .unwrap();
        let m = s.build().unwrap();
        assert_eq!(m.kind(), ModelKind::Fixed);
        let back = m.to_spec();
        assert_eq!(back.build().unwrap().prior(), m.prior());

        let tagged = r#"{"model":"niw","mu0":[1],"sigma0":1,"kappa0":1,"nu0":1}"#;
        assert_eq!(ModelSpec::from_json(tagged, None).unwrap().kind(), ModelKind::Niw);
        assert!(ModelSpec::from_json(tagged, Some(ModelKind::Nig)).is_err());
        assert!(ModelSpec::from_json(r#"{"mu0":[1],"sigma0":1}"#, None).is_err());
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let bad = ModelSpec::Fixed {
            mu0: vec![0.0],
            psi0: MatrixParam::Scalar(-1.0),
            sigma0: MatrixParam::Scalar(1.0),
        };
        assert!(matches!(bad.build(), Err(Error::Domain(_))));
        let bad = ModelSpec::Niw {
            mu0: vec![0.0],
            sigma0: MatrixParam::Scalar(1.0),
            kappa0: 0.0,
            nu0: 1.0,
        };
        assert!(matches!(bad.build(), Err(Error::Usage(_))));
    }
}
