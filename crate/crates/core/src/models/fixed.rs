//! Normal components with known covariance `Σ₀`, Normal prior `N(μ₀, Ψ₀)` on
//! the mean.
//!
//! `T(x) = Σ₀⁻¹x`, `a = pack(Σ₀⁻¹)`, `χ = Ψ₀⁻¹μ₀`, `τ = pack(Ψ₀⁻¹)`. A general
//! `(χ, τ)` decodes to a precision `P = unpack(τ)` and location `b = χ`, and
//! `A(χ, τ) = −½ ln|P| + ½ bᵀP⁻¹b`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::sym::{pack_flat, unpack_flat};
use crate::error::{Error, Result};
use crate::expfam::{ExpFamilyModel, NaturalParams};
use crate::linalg::{self, Chol};

#[derive(Debug, Clone)]
pub struct FixedCovSpec {
    pub mu0: DVector<f64>,
    pub psi0: DMatrix<f64>,
    pub sigma0: DMatrix<f64>,
}

/// Decoded coordinates of a fixed-covariance `(χ, τ)`.
#[derive(Debug, Clone)]
pub struct FixedDecoded {
    pub precision: DMatrix<f64>,
    pub location: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct FixedCovModel {
    spec: FixedCovSpec,
    sigma_chol: Chol,
    sigma_inv: DMatrix<f64>,
    a: Vec<f64>,
    prior: NaturalParams,
    log_h_const: f64,
    a_prior: f64,
}

impl FixedCovModel {
    pub fn new(spec: FixedCovSpec) -> Result<Self> {
        let d = spec.mu0.len();
        if d == 0 {
            return Err(Error::usage("mu0 must have at least one coordinate"));
        }
        let sigma_chol = linalg::spd_param(&spec.sigma0, d, "Sigma0")?;
        let psi_chol = linalg::spd_param(&spec.psi0, d, "Psi0")?;
        let sigma_inv = sigma_chol.inverse();
        let psi_inv = psi_chol.inverse();
        let a = pack_flat(&sigma_inv);
        let prior = NaturalParams::new(
            (&psi_inv * &spec.mu0).iter().copied().collect(),
            pack_flat(&psi_inv),
        );
        let log_h_const = -0.5 * d as f64 * (2.0 * PI).ln() - 0.5 * linalg::log_det(&sigma_chol);
        let mut model = FixedCovModel {
            spec,
            sigma_chol,
            sigma_inv,
            a,
            prior,
            log_h_const,
            a_prior: 0.0,
        };
        model.a_prior = model.log_partition(&model.prior)?;
        Ok(model)
    }

    pub fn spec(&self) -> &FixedCovSpec {
        &self.spec
    }

    pub fn sigma_inv(&self) -> &DMatrix<f64> {
        &self.sigma_inv
    }

    pub fn decode(&self, params: &NaturalParams) -> Result<FixedDecoded> {
        let d = self.dim();
        if params.chi.len() != d || params.tau.len() != self.tau_dim() {
            return Err(Error::usage("parameter length mismatch"));
        }
        Ok(FixedDecoded {
            precision: unpack_flat(&params.tau, d),
            location: DVector::from_column_slice(&params.chi),
        })
    }

    pub fn encode(&self, decoded: &FixedDecoded) -> NaturalParams {
        NaturalParams::new(
            decoded.location.iter().copied().collect(),
            pack_flat(&decoded.precision),
        )
    }
}

impl ExpFamilyModel for FixedCovModel {
    fn dim(&self) -> usize {
        self.spec.mu0.len()
    }

    fn stat_dim(&self) -> usize {
        self.dim()
    }

    fn tau_dim(&self) -> usize {
        let d = self.dim();
        d * (d + 1) / 2
    }

    fn suff_stat_into(&self, x: &[f64], out: &mut [f64]) {
        let t = self.sigma_chol.solve(&DVector::from_column_slice(x));
        out.copy_from_slice(t.as_slice());
    }

    fn log_h(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        self.log_h_const - 0.5 * linalg::inv_quad(&self.sigma_chol, &x)
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
        let chol = linalg::cholesky(&dec.precision, "decoded precision")?;
        Ok(-0.5 * linalg::log_det(&chol) + 0.5 * linalg::inv_quad(&chol, &dec.location))
    }
}
