//! Normal components whose covariance is known up to a common scale `λ`:
//! `λ ~ IG(β₀ + 1, β₀)`, `μ | λ ~ N(μ₀, λΨ₀)`, `x | μ, λ ~ N(μ, λΣ₀)`.
//!
//! `T(x) = [−½xᵀΣ₀⁻¹x; Σ₀⁻¹x]` and `a = [d/2; pack(Σ₀⁻¹)]`. A general
//! `(χ, τ)` decodes to a shape-like `c = τ₀`, a precision `P = unpack(τ₁..)`,
//! a location `b = χ₁..` and a residual scale `r = −χ₀ − ½bᵀP⁻¹b`, giving
//!
//! ```text
//! A(χ, τ) = −½ ln|P| + ln Γ(c − 1) − (c − 1) ln r
//! ```
//!
//! on the admissible set `{P ≻ 0, c > 1, r > 0}`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::ln_gamma;

use super::sym::{pack_flat, unpack_flat};
use crate::error::{Error, Result};
use crate::expfam::{ExpFamilyModel, NaturalParams};
use crate::linalg::{self, Chol};

#[derive(Debug, Clone)]
pub struct NigSpec {
    pub mu0: DVector<f64>,
    pub psi0: DMatrix<f64>,
    pub sigma0: DMatrix<f64>,
    pub beta0: f64,
}

#[derive(Debug, Clone)]
pub struct NigDecoded {
    pub shape: f64,
    pub precision: DMatrix<f64>,
    pub location: DVector<f64>,
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub struct NigModel {
    spec: NigSpec,
    sigma_chol: Chol,
    sigma_inv: DMatrix<f64>,
    a: Vec<f64>,
    prior: NaturalParams,
    log_h_const: f64,
    a_prior: f64,
}

impl NigModel {
    pub fn new(spec: NigSpec) -> Result<Self> {
        let d = spec.mu0.len();
        if d == 0 {
            return Err(Error::usage("mu0 must have at least one coordinate"));
        }
        if !(spec.beta0.is_finite() && spec.beta0 > 0.0) {
            return Err(Error::usage("beta0 must be positive"));
        }
        let sigma_chol = linalg::spd_param(&spec.sigma0, d, "Sigma0")?;
        let psi_chol = linalg::spd_param(&spec.psi0, d, "Psi0")?;
        let sigma_inv = sigma_chol.inverse();
        let psi_inv = psi_chol.inverse();

        let mut a = vec![d as f64 / 2.0];
        a.extend(pack_flat(&sigma_inv));

        let location = &psi_inv * &spec.mu0;
        let mut chi = vec![-spec.beta0 - 0.5 * spec.mu0.dot(&location)];
        chi.extend(location.iter().copied());
        let mut tau = vec![spec.beta0 + 2.0];
        tau.extend(pack_flat(&psi_inv));

        let log_h_const = -0.5 * d as f64 * (2.0 * PI).ln() - 0.5 * linalg::log_det(&sigma_chol);
        let mut model = NigModel {
            spec,
            sigma_chol,
            sigma_inv,
            a,
            prior: NaturalParams::new(chi, tau),
            log_h_const,
            a_prior: 0.0,
        };
        model.a_prior = model.log_partition(&model.prior)?;
        Ok(model)
    }

    pub fn spec(&self) -> &NigSpec {
        &self.spec
    }

    pub fn sigma_inv(&self) -> &DMatrix<f64> {
        &self.sigma_inv
    }

    /// Decodes `(χ, τ)`; fails only on length mismatch or a singular
    /// precision. Admissibility of `shape`/`scale` is checked by
    /// [`ExpFamilyModel::log_partition`].
    pub fn decode(&self, params: &NaturalParams) -> Result<NigDecoded> {
        let d = self.dim();
        if params.chi.len() != self.stat_dim() || params.tau.len() != self.tau_dim() {
            return Err(Error::usage("parameter length mismatch"));
        }
        let precision = unpack_flat(&params.tau[1..], d);
        let location = DVector::from_column_slice(&params.chi[1..]);
        let chol = linalg::cholesky(&precision, "decoded precision")?;
        let scale = -params.chi[0] - 0.5 * linalg::inv_quad(&chol, &location);
        Ok(NigDecoded {
            shape: params.tau[0],
            precision,
            location,
            scale,
        })
    }

    pub fn encode(&self, decoded: &NigDecoded) -> Result<NaturalParams> {
        let chol = linalg::cholesky(&decoded.precision, "precision")?;
        let mut chi = vec![-decoded.scale - 0.5 * linalg::inv_quad(&chol, &decoded.location)];
        chi.extend(decoded.location.iter().copied());
        let mut tau = vec![decoded.shape];
        tau.extend(pack_flat(&decoded.precision));
        Ok(NaturalParams::new(chi, tau))
    }
}

impl ExpFamilyModel for NigModel {
    fn dim(&self) -> usize {
        self.spec.mu0.len()
    }

    fn stat_dim(&self) -> usize {
        self.dim() + 1
    }

    fn tau_dim(&self) -> usize {
        let d = self.dim();
        1 + d * (d + 1) / 2
    }

    fn suff_stat_into(&self, x: &[f64], out: &mut [f64]) {
        let xv = DVector::from_column_slice(x);
        let t = self.sigma_chol.solve(&xv);
        out[0] = -0.5 * xv.dot(&t);
        out[1..].copy_from_slice(t.as_slice());
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
        if !(dec.shape > 1.0) {
            return Err(Error::domain(format!("decoded shape {} must exceed 1", dec.shape)));
        }
        if !(dec.scale > 0.0) {
            return Err(Error::domain(format!("decoded scale {} must be positive", dec.scale)));
        }
        let chol = linalg::cholesky(&dec.precision, "decoded precision")?;
        let k = dec.shape - 1.0;
        Ok(-0.5 * linalg::log_det(&chol) + ln_gamma(k) - k * dec.scale.ln())
    }
}
