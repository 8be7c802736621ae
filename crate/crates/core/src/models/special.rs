use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// `ln Γ_d(a) = d(d−1)/4 · ln π + Σ_{j=1..d} ln Γ(a + (1 − j)/2)`, defined for
/// `a > (d − 1)/2`.
pub fn log_mvgamma(d: usize, a: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::usage("multivariate gamma needs d >= 1"));
    }
    let df = d as f64;
    if !(a.is_finite() && a > (df - 1.0) / 2.0) {
        return Err(Error::domain(format!(
            "ln Γ_{d}({a}) is undefined: need a > {}",
            (df - 1.0) / 2.0
        )));
    }
    let terms: f64 = (1..=d).map(|j| ln_gamma(a + (1.0 - j as f64) / 2.0)).sum();
    Ok(df * (df - 1.0) / 4.0 * PI.ln() + terms)
}
