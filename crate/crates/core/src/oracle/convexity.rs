//! Convexity probes for the log-partition function.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::expfam::{ExpFamilyModel, NaturalParams};
use crate::models::fixed::FixedDecoded;
use crate::models::nig::NigDecoded;
use crate::models::niw::NiwDecoded;
use crate::models::NormalModel;

/// `λA(P₁) + (1 − λ)A(P₂) − A(λP₁ + (1 − λ)P₂)`.
///
/// Both endpoints must be admissible (`a` succeeds), distinct, and
/// `0 < λ < 1`. An inadmissible mixture is reported as a domain error.
pub fn convexity_probe<F>(a: F, p1: &NaturalParams, p2: &NaturalParams, lambda: f64) -> Result<f64>
where
    F: Fn(&NaturalParams) -> Result<f64>,
{
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::usage(format!("mixing weight must lie in (0, 1), got {lambda}")));
    }
    if p1 == p2 {
        return Err(Error::usage("convexity probe needs two distinct parameter points"));
    }
    if p1.chi.len() != p2.chi.len() || p1.tau.len() != p2.tau.len() {
        return Err(Error::usage("parameter points differ in length"));
    }
    let a1 = a(p1)?;
    let a2 = a(p2)?;
    let mid = a(&p1.mix(p2, lambda)).map_err(|e| Error::domain(format!("mixture left the admissible set: {e}")))?;
    Ok(lambda * a1 + (1.0 - lambda) * a2 - mid)
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi).exp()
}

fn random_spd<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let base = &g * g.transpose() + DMatrix::identity(d, d) * 0.05;
    base * log_uniform(rng, -2.0, 2.0)
}

fn random_vec<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(d, |_, _| 3.0 * rng.sample::<f64, _>(StandardNormal))
}

/// A random point in the admissible set of `model`'s log-partition.
pub fn random_admissible<R: Rng + ?Sized>(model: &NormalModel, rng: &mut R) -> Result<NaturalParams> {
    let d = model.dim();
    let params = match model {
        NormalModel::Fixed(m) => m.encode(&FixedDecoded {
            precision: random_spd(d, rng),
            location: random_vec(d, rng),
        }),
        NormalModel::Nig(m) => m.encode(&NigDecoded {
            shape: 1.0 + log_uniform(rng, -3.0, 3.0),
            precision: random_spd(d, rng),
            location: random_vec(d, rng),
            scale: log_uniform(rng, -3.0, 3.0),
        })?,
        NormalModel::Niw(m) => m.encode(&NiwDecoded {
            kappa: log_uniform(rng, -3.0, 3.0),
            dof: d as f64 - 1.0 + log_uniform(rng, -3.0, 3.0),
            mean: random_vec(d, rng),
            scale: random_spd(d, rng),
        }),
    };
    debug_assert!(model.in_domain(&params));
    Ok(params)
}
