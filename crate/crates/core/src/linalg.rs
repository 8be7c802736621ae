//! Small dense helpers over `nalgebra`. Every determinant and inverse in the
//! crate goes through a Cholesky factor.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

pub type Chol = Cholesky<f64, Dyn>;

/// Cholesky factor of `m`, or a domain error naming `what` if `m` is not SPD.
pub fn cholesky(m: &DMatrix<f64>, what: &str) -> Result<Chol> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!("{what} has non-finite entries")));
    }
    Cholesky::new(m.clone()).ok_or_else(|| Error::domain(format!("{what} is not positive definite")))
}

/// log |M| = 2 Σ ln L_ii.
pub fn log_det(chol: &Chol) -> f64 {
    2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>()
}

/// `v^T M^{-1} v` via the factor of `M`.
pub fn inv_quad(chol: &Chol, v: &DVector<f64>) -> f64 {
    let z = chol.l().solve_lower_triangular(v).expect("Cholesky factor is nonsingular");
    z.dot(&z)
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Validates an SPD hyperparameter matrix and returns its factor.
pub(crate) fn spd_param(m: &DMatrix<f64>, d: usize, what: &str) -> Result<Chol> {
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::usage(format!(
            "{what} must be {d}x{d}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if max_asymmetry(m) > 1e-12 {
        return Err(Error::usage(format!("{what} is not symmetric")));
    }
    cholesky(m, what)
}
