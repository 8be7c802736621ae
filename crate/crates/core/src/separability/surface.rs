//! Data-space form of a statistic-space certificate.
//!
//! Under the fixed-covariance model `a·T(x) + b` is affine in `x`; under NIW
//! it is a general quadratic; under NIG the quadratic part is a multiple of
//! `Σ₀⁻¹`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::certify::Certificate;
use crate::error::{Error, Result};
use crate::expfam::ExpFamilyModel;
use crate::models::sym::{low_index, low_len};
use crate::models::NormalModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DecodedSurface {
    /// `{x : normal·x + offset = 0}`.
    Hyperplane { normal: Vec<f64>, offset: f64 },
    /// `{x : xᵀMx + w·x + c = 0}`; `ellipsoidal` when `M` is definite.
    Quadric {
        #[serde(rename = "M")]
        m: Vec<Vec<f64>>,
        w: Vec<f64>,
        c: f64,
        ellipsoidal: bool,
    },
}

impl DecodedSurface {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            DecodedSurface::Hyperplane { normal, offset } => {
                normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + offset
            }
            DecodedSurface::Quadric { m, w, c, .. } => {
                let mut q = 0.0;
                for (i, row) in m.iter().enumerate() {
                    for (j, mij) in row.iter().enumerate() {
                        q += x[i] * mij * x[j];
                    }
                }
                q + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + c
            }
        }
    }

    pub fn matrix(&self) -> Option<DMatrix<f64>> {
        match self {
            DecodedSurface::Quadric { m, .. } => {
                let d = m.len();
                Some(DMatrix::from_fn(d, d, |i, j| m[i][j]))
            }
            DecodedSurface::Hyperplane { .. } => None,
        }
    }
}

fn is_definite(m: &DMatrix<f64>) -> bool {
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let scale = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if scale == 0.0 {
        return false;
    }
    let tol = 1e-12 * scale;
    eig.iter().all(|&v| v > tol) || eig.iter().all(|&v| v < -tol)
}

fn quadric(m: DMatrix<f64>, w: DVector<f64>, c: f64) -> DecodedSurface {
    if m.iter().all(|&v| v == 0.0) {
        return DecodedSurface::Hyperplane {
            normal: w.iter().copied().collect(),
            offset: c,
        };
    }
    DecodedSurface::Quadric {
        ellipsoidal: is_definite(&m),
        m: m.row_iter().map(|r| r.iter().copied().collect()).collect(),
        w: w.iter().copied().collect(),
        c,
    }
}

/// Decodes `a·T(x) + b` into data-space coefficients for `model`.
pub fn decode_surface(cert: &Certificate, model: &NormalModel) -> Result<DecodedSurface> {
    if cert.a.len() != model.stat_dim() {
        return Err(Error::usage(format!(
            "certificate has {} coefficients but the {} model has statistic dimension {}",
            cert.a.len(),
            model.kind(),
            model.stat_dim()
        )));
    }
    let d = model.dim();
    let a = &cert.a;
    Ok(match model {
        NormalModel::Fixed(m) => {
            let normal = m.sigma_inv() * DVector::from_column_slice(a);
            DecodedSurface::Hyperplane {
                normal: normal.iter().copied().collect(),
                offset: cert.b,
            }
        }
        NormalModel::Niw(_) => {
            let mut mat = DMatrix::zeros(d, d);
            for i in 0..d {
                mat[(i, i)] = -0.5 * a[i];
                for j in 0..i {
                    let v = -0.5 * a[d + low_index(i, j)];
                    mat[(i, j)] = v;
                    mat[(j, i)] = v;
                }
            }
            let w = DVector::from_column_slice(&a[d + low_len(d)..]);
            // kept as a quadric even when the quadratic part vanishes
            DecodedSurface::Quadric {
                ellipsoidal: is_definite(&mat),
                m: mat.row_iter().map(|r| r.iter().copied().collect()).collect(),
                w: w.iter().copied().collect(),
                c: cert.b,
            }
        }
        NormalModel::Nig(m) => {
            let gamma = a[0];
            let mat = m.sigma_inv() * (-0.5 * gamma);
            let w = m.sigma_inv() * DVector::from_column_slice(&a[1..]);
            quadric(mat, w, cert.b)
        }
    })
}

/// `‖M − ((M·S)/(S·S))·S‖_F / ‖M‖_F`: zero exactly when `M ∝ S`.
pub fn proportionality_residual(m: &DMatrix<f64>, s: &DMatrix<f64>) -> f64 {
    let coef = m.dot(s) / s.dot(s);
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m - s * coef).norm() / norm
}
