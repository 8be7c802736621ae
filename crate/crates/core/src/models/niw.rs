//! Normal components with unknown mean and covariance under the
//! Normal-inverse-Wishart prior `Λ ~ W⁻¹(ν₀ + d + 1, ν₀Σ₀)`,
//! `μ | Λ ~ N(μ₀, Λ/κ₀)`.
//!
//! `T(x) = [−½diag(xxᵀ); −low(xxᵀ); x]`, `a = [1, 1]`,
//! `χ = [−½diag(S₀); −low(S₀); κ₀μ₀]` with `S₀ = ν₀Σ₀ + κ₀μ₀μ₀ᵀ`, and
//! `τ = [ν₀ + 2d + 3, κ₀]`.
//!
//! A general `(χ, τ)` decodes to `κ = τ₁`, degrees of freedom
//! `ν' = τ₀ − d − 2`, scatter `S` from the first two blocks, mean
//! `m = χ_lin/κ`, and `Ψ = S − κmmᵀ`:
//!
//! ```text
//! A(χ, τ) = −(d/2) ln κ − (ν'/2) ln(|Ψ|/2^d) + ln Γ_d(ν'/2)
//! ```

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::special::log_mvgamma;
use super::sym::{low_index, low_len};
use crate::error::{Error, Result};
use crate::expfam::{ExpFamilyModel, NaturalParams};
use crate::linalg;

#[derive(Debug, Clone)]
pub struct NiwSpec {
    pub mu0: DVector<f64>,
    pub sigma0: DMatrix<f64>,
    pub kappa0: f64,
    pub nu0: f64,
}

#[derive(Debug, Clone)]
pub struct NiwDecoded {
    pub kappa: f64,
    /// Inverse-Wishart degrees of freedom `ν'`.
    pub dof: f64,
    pub mean: DVector<f64>,
    /// Inverse-Wishart scale `Ψ`.
    pub scale: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct NiwModel {
    spec: NiwSpec,
    a: Vec<f64>,
    prior: NaturalParams,
    log_h_const: f64,
    a_prior: f64,
}

impl NiwModel {
    pub fn new(spec: NiwSpec) -> Result<Self> {
        let d = spec.mu0.len();
        if d == 0 {
            return Err(Error::usage("mu0 must have at least one coordinate"));
        }
        if !(spec.kappa0.is_finite() && spec.kappa0 > 0.0) {
            return Err(Error::usage("kappa0 must be positive"));
        }
        if !(spec.nu0.is_finite() && spec.nu0 > 0.0) {
            return Err(Error::usage("nu0 must be positive"));
        }
        linalg::spd_param(&spec.sigma0, d, "Sigma0")?;
        let mut model = NiwModel {
            a: vec![1.0, 1.0],
            prior: NaturalParams::new(vec![], vec![]),
            log_h_const: -0.5 * d as f64 * (2.0 * PI).ln(),
            a_prior: 0.0,
            spec,
        };
        let df = d as f64;
        model.prior = model.encode(&NiwDecoded {
            kappa: model.spec.kappa0,
            dof: model.spec.nu0 + df + 1.0,
            mean: model.spec.mu0.clone(),
            scale: &model.spec.sigma0 * model.spec.nu0,
        });
        model.a_prior = model.log_partition(&model.prior)?;
        Ok(model)
    }

    pub fn spec(&self) -> &NiwSpec {
        &self.spec
    }

    pub fn decode(&self, params: &NaturalParams) -> Result<NiwDecoded> {
        let d = self.dim();
        if params.chi.len() != self.stat_dim() || params.tau.len() != 2 {
            return Err(Error::usage("parameter length mismatch"));
        }
        let kappa = params.tau[1];
        let dof = params.tau[0] - d as f64 - 2.0;
        let mut scatter = DMatrix::zeros(d, d);
        for i in 0..d {
            scatter[(i, i)] = -2.0 * params.chi[i];
            for j in 0..i {
                let v = -params.chi[d + low_index(i, j)];
                scatter[(i, j)] = v;
                scatter[(j, i)] = v;
            }
        }
        let lin = DVector::from_column_slice(&params.chi[d + low_len(d)..]);
        let mean = &lin / kappa;
        let scale = scatter - (&lin * lin.transpose()) / kappa;
        Ok(NiwDecoded {
            kappa,
            dof,
            mean,
            scale,
        })
    }

    pub fn encode(&self, decoded: &NiwDecoded) -> NaturalParams {
        let d = self.dim();
        let scatter = &decoded.scale + (&decoded.mean * decoded.mean.transpose()) * decoded.kappa;
        let mut chi: Vec<f64> = (0..d).map(|i| -0.5 * scatter[(i, i)]).collect();
        for i in 0..d {
            for j in 0..i {
                chi.push(-scatter[(i, j)]);
            }
        }
        chi.extend((&decoded.mean * decoded.kappa).iter().copied());
        NaturalParams::new(chi, vec![decoded.dof + d as f64 + 2.0, decoded.kappa])
    }
}

impl ExpFamilyModel for NiwModel {
    fn dim(&self) -> usize {
        self.spec.mu0.len()
    }

    fn stat_dim(&self) -> usize {
        let d = self.dim();
        d * (d + 3) / 2
    }

    fn tau_dim(&self) -> usize {
        2
    }

    fn suff_stat_into(&self, x: &[f64], out: &mut [f64]) {
        let d = x.len();
        for i in 0..d {
            out[i] = -0.5 * x[i] * x[i];
            for j in 0..i {
                out[d + low_index(i, j)] = -x[i] * x[j];
            }
        }
        out[d + low_len(d)..].copy_from_slice(x);
    }

    fn log_h(&self, _x: &[f64]) -> f64 {
        self.log_h_const
    }

    fn tau_increment(&self) -> &[f64] {
        &self.a
    }

    fn prior(&self) -> &NaturalParams {
        &self.prior
    }

    fn log_partition_prior(&self) -> f64 {
        self.a_prior
    }

    fn log_partition(&self, params: &NaturalParams) -> Result<f64> {
        let dec = self.decode(params)?;
        let d = self.dim() as f64;
        if !(dec.kappa > 0.0) {
            return Err(Error::domain(format!("decoded kappa {} must be positive", dec.kappa)));
        }
        if !(dec.dof > d - 1.0) {
            return Err(Error::domain(format!(
                "decoded degrees of freedom {} must exceed {}",
                dec.dof,
                d - 1.0
            )));
        }
        let chol = linalg::cholesky(&dec.scale, "decoded inverse-Wishart scale")?;
        let half = dec.dof / 2.0;
        Ok(-0.5 * d * dec.kappa.ln()
            - half * (linalg::log_det(&chol) - d * 2f64.ln())
            + log_mvgamma(self.dim(), half)?)
    }
}
