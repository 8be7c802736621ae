//! Marginal likelihoods computed straight from the generative model, by
//! numerical integration over the component parameters (d = 1) or by Monte
//! Carlo over prior draws (any d). Neither path touches the closed forms.

use std::cell::RefCell;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use super::quadrature::{find_mode, log_integrate_line, Estimate, QuadratureSpec};
use crate::error::{Error, Result};
use crate::expfam::ExpFamilyModel;
use crate::models::{ModelSpec, NormalModel};
use crate::sampling::{mvn_log_density, sample_component};

/// Largest cluster the quadrature oracle accepts.
pub const MAX_QUADRATURE_POINTS: usize = 6;

fn ln_normal(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (2.0 * PI * var).ln() - 0.5 * (x - mean) * (x - mean) / var
}

/// `ln IG(v; shape, scale)`.
fn ln_inv_gamma(v: f64, shape: f64, scale: f64) -> f64 {
    shape * scale.ln() - ln_gamma(shape) - (shape + 1.0) * v.ln() - scale / v
}

fn location_guess(points: &[f64], mu0: f64) -> f64 {
    (points.iter().sum::<f64>() + mu0) / (points.len() + 1) as f64
}

/// Scalar hyperparameters of a one-dimensional model.
enum Scalar {
    Fixed { mu0: f64, psi: f64, sigma: f64 },
    Nig { mu0: f64, psi: f64, sigma: f64, beta0: f64 },
    Niw { mu0: f64, sigma: f64, kappa0: f64, nu0: f64 },
}

impl Scalar {
    fn from_model(model: &NormalModel) -> Scalar {
        match model {
            NormalModel::Fixed(m) => {
                let s = m.spec();
                Scalar::Fixed {
                    mu0: s.mu0[0],
                    psi: s.psi0[(0, 0)],
                    sigma: s.sigma0[(0, 0)],
                }
            }
            NormalModel::Nig(m) => {
                let s = m.spec();
                Scalar::Nig {
                    mu0: s.mu0[0],
                    psi: s.psi0[(0, 0)],
                    sigma: s.sigma0[(0, 0)],
                    beta0: s.beta0,
                }
            }
            NormalModel::Niw(m) => {
                let s = m.spec();
                Scalar::Niw {
                    mu0: s.mu0[0],
                    sigma: s.sigma0[(0, 0)],
                    kappa0: s.kappa0,
                    nu0: s.nu0,
                }
            }
        }
    }
}

/// Integrates `ln p(scale) + ln ∫ p(μ | scale) Π p(xᵢ | μ, scale) dμ` over
/// `u = ln scale`.
///
/// The inner integral is at most `(2π·obs_var)^{-k/2}`. Wherever that bound
/// puts the integrand more than 745 nats below a value already seen, the
/// contribution underflows and the inner integral is skipped; that is what
/// keeps extremely small or large scales from being resolved numerically.
fn nested(
    points: &[f64],
    mu0: f64,
    log_scale_prior: impl Fn(f64) -> f64,
    mean_var: impl Fn(f64) -> f64,
    obs_var: impl Fn(f64) -> f64,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let inner_spec = QuadratureSpec {
        rel_tol: spec.rel_tol * 1e-2,
        ..*spec
    };
    let start = location_guess(points, mu0);
    let k = points.len() as f64;
    let bound = |u: f64| {
        let lambda = u.exp();
        log_scale_prior(lambda) + u - 0.5 * k * (2.0 * PI * obs_var(lambda)).ln()
    };
    let inner_error = RefCell::new(0.0f64);
    let full = |u: f64| -> Result<f64> {
        let lambda = u.exp();
        let (mv, ov) = (mean_var(lambda), obs_var(lambda));
        let e = log_integrate_line(
            |mu: f64| ln_normal(mu, mu0, mv) + points.iter().map(|&x| ln_normal(x, mu, ov)).sum::<f64>(),
            start,
            &inner_spec,
        )?;
        let mut worst = inner_error.borrow_mut();
        *worst = worst.max(e.error);
        Ok(log_scale_prior(lambda) + u + e.value)
    };
    let anchor = find_mode(&bound, 0.0);
    let floor = full(anchor)? - 745.0;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let outer = log_integrate_line(
        |u: f64| {
            let b = bound(u);
            if !(b >= floor) {
                return f64::NEG_INFINITY;
            }
            full(u).unwrap_or_else(|err| {
                failure.borrow_mut().get_or_insert(err);
                f64::NAN
            })
        },
        anchor,
        spec,
    );
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let outer = outer?;
    Ok(Estimate {
        value: outer.value,
        error: outer.error + inner_error.into_inner(),
    })
}

/// `ln f_k(points)` for a one-dimensional model by nested adaptive
/// quadrature over the component parameters.
///
/// `error` in the result is an estimate of the relative error of the integral
/// (equivalently, the absolute error of its log).
pub fn quadrature_log_marginal(spec: &ModelSpec, points: &[f64], qspec: &QuadratureSpec) -> Result<Estimate> {
    if spec.dim() != 1 {
        return Err(Error::usage(format!("quadrature oracle needs d = 1, got d = {}", spec.dim())));
    }
    if points.is_empty() || points.len() > MAX_QUADRATURE_POINTS {
        return Err(Error::usage(format!(
            "quadrature oracle takes 1..={MAX_QUADRATURE_POINTS} points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(Error::usage("non-finite data point"));
    }
    let model = spec.build()?;
    match Scalar::from_model(&model) {
        Scalar::Fixed { mu0, psi, sigma } => log_integrate_line(
            |mu: f64| ln_normal(mu, mu0, psi) + points.iter().map(|&x| ln_normal(x, mu, sigma)).sum::<f64>(),
            location_guess(points, mu0),
            qspec,
        ),
        Scalar::Nig { mu0, psi, sigma, beta0 } => nested(
            points,
            mu0,
            |lambda| ln_inv_gamma(lambda, beta0 + 1.0, beta0),
            |lambda| lambda * psi,
            |lambda| lambda * sigma,
            qspec,
        ),
        Scalar::Niw { mu0, sigma, kappa0, nu0 } => {
            // inverse-Wishart with ν₀ + 2 degrees of freedom and scale ν₀σ₀²
            // is, in one dimension, an inverse-gamma
            let dof = nu0 + 2.0;
            nested(
                points,
                mu0,
                |v| ln_inv_gamma(v, 0.5 * dof, 0.5 * nu0 * sigma),
                |v| v / kappa0,
                |v| v,
                qspec,
            )
        }
    }
}

/// A Monte-Carlo estimate of `f_k`, kept in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    /// `ln` of the sample mean of the likelihood.
    pub log_mean: f64,
    /// Standard error of the sample mean, relative to the mean.
    pub rel_std_error: f64,
    pub draws: usize,
}

impl MonteCarloEstimate {
    /// Whether `log_value` is within `sigmas` standard errors of the estimate.
    pub fn agrees_with(&self, log_value: f64, sigmas: f64) -> bool {
        ((log_value - self.log_mean).exp() - 1.0).abs() <= sigmas * self.rel_std_error
    }
}

const MC_CHUNKS: u64 = 64;

/// `f_k(points)` as the prior mean of the likelihood `Π g_θ(xᵢ)`.
/// Deterministic given `seed` regardless of thread count.
pub fn monte_carlo_log_marginal(
    model: &NormalModel,
    points: &[Vec<f64>],
    draws: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if draws < 2 || points.is_empty() {
        return Err(Error::usage("need at least two draws and one point"));
    }
    if points.iter().any(|p| p.len() != model.dim()) {
        return Err(Error::usage("point dimension does not match the model"));
    }
    let per_chunk = draws.div_ceil(MC_CHUNKS as usize);
    let chunks: Vec<Vec<f64>> = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = per_chunk.min(draws.saturating_sub(c as usize * per_chunk));
            (0..count)
                .map(|_| {
                    let comp = sample_component(model, &mut rng)?;
                    points
                        .iter()
                        .map(|x| mvn_log_density(x, &comp.mean, &comp.cov))
                        .sum::<Result<f64>>()
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let logs: Vec<f64> = chunks.into_iter().flatten().collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n = logs.len() as f64;
    let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
    let mean = w.iter().sum::<f64>() / n;
    let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(MonteCarloEstimate {
        log_mean: top + mean.ln(),
        rel_std_error: (var / n).sqrt() / mean,
        draws: logs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expfam::{log_marginal, Dataset};
    use crate::models::ModelKind;

    fn spec(kind: ModelKind) -> ModelSpec {
        ModelSpec::isotropic(kind, 1, 1.0, 1.0, 1.0)
    }

    #[test]
    fn fixed_single_point_is_normal_with_doubled_variance() {
        let e = quadrature_log_marginal(&spec(ModelKind::Fixed), &[0.0], &QuadratureSpec::default()).unwrap();
        assert!((e.value - ln_normal(0.0, 0.0, 2.0)).abs() < 1e-10);
    }

    #[test]
    fn nig_single_point_is_three_eighths() {
        let e = quadrature_log_marginal(&spec(ModelKind::Nig), &[0.0], &QuadratureSpec::default()).unwrap();
        assert!((e.value - 0.375f64.ln()).abs() < 1e-9, "{}", e.value);
    }

    #[test]
    fn niw_single_point_is_student_t() {
        // t with 3 dof and squared scale 2/3, evaluated at its centre
        let s2: f64 = 2.0 / 3.0;
        let expected = ln_gamma(2.0) - ln_gamma(1.5) - 0.5 * (3.0 * PI * s2).ln();
        let e = quadrature_log_marginal(&spec(ModelKind::Niw), &[0.0], &QuadratureSpec::default()).unwrap();
        assert!((e.value - expected).abs() < 1e-9, "{} vs {expected}", e.value);
    }

    #[test]
    fn halving_tolerance_moves_less_than_error_estimate() {
        let s = ModelSpec::isotropic(ModelKind::Nig, 1, 0.7, 2.0, 1.5);
        let pts = [0.3, -1.2, 2.5];
        let coarse = quadrature_log_marginal(&s, &pts, &QuadratureSpec::with_rel_tol(1e-8)).unwrap();
        let fine = quadrature_log_marginal(&s, &pts, &QuadratureSpec::with_rel_tol(5e-9)).unwrap();
        assert!((coarse.value - fine.value).abs() <= coarse.error.max(1e-14));
    }

    #[test]
    fn preconditions() {
        let q = QuadratureSpec::default();
        assert!(quadrature_log_marginal(&spec(ModelKind::Fixed), &[], &q).is_err());
        assert!(quadrature_log_marginal(&spec(ModelKind::Fixed), &[0.0; 7], &q).is_err());
        let two_d = ModelSpec::isotropic(ModelKind::Fixed, 2, 1.0, 1.0, 1.0);
        assert!(matches!(quadrature_log_marginal(&two_d, &[0.0], &q), Err(Error::Usage(_))));
    }

    #[test]
    fn monte_carlo_agrees_in_two_dimensions() {
        let rows = vec![vec![0.2, -0.4], vec![1.0, 0.3]];
        let data = Dataset::new(rows.clone()).unwrap();
        for kind in ModelKind::ALL {
            let m = ModelSpec::isotropic(kind, 2, 1.0, 2.0, 4.0).build().unwrap();
            let mc = monte_carlo_log_marginal(&m, &rows, 200_000, 9).unwrap();
            let exact = log_marginal(&m, &[0, 1], &data).unwrap();
            assert!(mc.agrees_with(exact, 4.0), "{kind}: {exact} vs {mc:?}");
        }
    }
}
