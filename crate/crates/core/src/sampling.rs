//! Draws from the three priors and their component distributions.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::expfam::ExpFamilyModel;
use crate::linalg;
use crate::models::NormalModel;

/// Component parameters: a mean and a covariance.
#[derive(Debug, Clone)]
pub struct Component {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

fn standard_normal_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

/// `N(mean, cov)` via the Cholesky factor of `cov`.
pub fn sample_mvn<R: Rng + ?Sized>(mean: &DVector<f64>, cov: &DMatrix<f64>, rng: &mut R) -> Result<DVector<f64>> {
    let chol = linalg::cholesky(cov, "covariance")?;
    Ok(mean + chol.l() * standard_normal_vec(mean.len(), rng))
}

/// Inverse-gamma with the given shape and scale (mean `scale/(shape − 1)`).
pub fn sample_inv_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> Result<f64> {
    let g = Gamma::new(shape, 1.0 / scale).map_err(|e| Error::domain(e.to_string()))?;
    Ok(1.0 / g.sample(rng))
}

/// Inverse-Wishart `W⁻¹(dof, scale)` by the Bartlett decomposition of the
/// Wishart `W(dof, scale⁻¹)`.
pub fn sample_inv_wishart<R: Rng + ?Sized>(dof: f64, scale: &DMatrix<f64>, rng: &mut R) -> Result<DMatrix<f64>> {
    let d = scale.nrows();
    if !(dof > d as f64 - 1.0) {
        return Err(Error::domain(format!("inverse-Wishart needs dof > {}", d - 1)));
    }
    let precision = linalg::cholesky(scale, "inverse-Wishart scale")?.inverse();
    let l = linalg::cholesky(&precision, "inverse-Wishart precision")?.l();
    let mut bartlett = DMatrix::zeros(d, d);
    for i in 0..d {
        let chi = ChiSquared::new(dof - i as f64).map_err(|e| Error::domain(e.to_string()))?;
        bartlett[(i, i)] = chi.sample(rng).sqrt();
        for j in 0..i {
            bartlett[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let la = l * bartlett;
    let wishart = &la * la.transpose();
    Ok(linalg::cholesky(&wishart, "Wishart draw")?.inverse())
}

/// One draw of component parameters from the model's prior.
pub fn sample_component<R: Rng + ?Sized>(model: &NormalModel, rng: &mut R) -> Result<Component> {
    let d = model.dim();
    match model {
        NormalModel::Fixed(m) => {
            let s = m.spec();
            Ok(Component {
                mean: sample_mvn(&s.mu0, &s.psi0, rng)?,
                cov: s.sigma0.clone(),
            })
        }
        NormalModel::Nig(m) => {
            let s = m.spec();
            let lambda = sample_inv_gamma(s.beta0 + 1.0, s.beta0, rng)?;
            Ok(Component {
                mean: sample_mvn(&s.mu0, &(&s.psi0 * lambda), rng)?,
                cov: &s.sigma0 * lambda,
            })
        }
        NormalModel::Niw(m) => {
            let s = m.spec();
            let cov = sample_inv_wishart(s.nu0 + d as f64 + 1.0, &(&s.sigma0 * s.nu0), rng)?;
            Ok(Component {
                mean: sample_mvn(&s.mu0, &(&cov / s.kappa0), rng)?,
                cov,
            })
        }
    }
}

/// `ln N(x; mean, cov)`.
pub fn mvn_log_density(x: &[f64], mean: &DVector<f64>, cov: &DMatrix<f64>) -> Result<f64> {
    let chol = linalg::cholesky(cov, "covariance")?;
    let r = DVector::from_column_slice(x) - mean;
    let d = x.len() as f64;
    Ok(-0.5 * d * (2.0 * std::f64::consts::PI).ln() - 0.5 * linalg::log_det(&chol) - 0.5 * linalg::inv_quad(&chol, &r))
}
