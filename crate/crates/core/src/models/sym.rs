//! Vectorization of symmetric matrices as `[diag; low]`.
//!
//! `low` lists the strictly-lower entries row by row: entry `(i, j)` with
//! `i > j` (0-based) sits at position `i(i−1)/2 + j`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymVec {
    pub diag: Vec<f64>,
    pub low: Vec<f64>,
}

/// Position of `(i, j)`, `i > j`, inside the `low` block.
pub fn low_index(i: usize, j: usize) -> usize {
    debug_assert!(i > j);
    i * (i - 1) / 2 + j
}

pub fn low_len(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

impl SymVec {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `[diag; low]` as one vector of length `d(d+1)/2`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.diag.iter().chain(&self.low).copied().collect()
    }

    pub fn from_flat(flat: &[f64], d: usize) -> Result<SymVec> {
        if flat.len() != d + low_len(d) {
            return Err(Error::usage(format!(
                "packed symmetric matrix of dimension {d} needs {} entries, got {}",
                d + low_len(d),
                flat.len()
            )));
        }
        Ok(SymVec {
            diag: flat[..d].to_vec(),
            low: flat[d..].to_vec(),
        })
    }
}

pub fn sym_pack(s: &DMatrix<f64>) -> Result<SymVec> {
    let d = s.nrows();
    if s.ncols() != d {
        return Err(Error::usage("matrix is not square"));
    }
    let scale = s.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut low = vec![0.0; low_len(d)];
    for i in 0..d {
        for j in 0..i {
            if (s[(i, j)] - s[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::usage(format!("matrix is not symmetric at ({i}, {j})")));
            }
            low[low_index(i, j)] = s[(i, j)];
        }
    }
    Ok(SymVec {
        diag: (0..d).map(|i| s[(i, i)]).collect(),
        low,
    })
}

pub fn sym_unpack(v: &SymVec) -> DMatrix<f64> {
    let d = v.dim();
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = v.diag[i];
        for j in 0..i {
            let x = v.low[low_index(i, j)];
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

/// Packs a matrix known to be symmetric (lower triangle wins).
pub(crate) fn pack_flat(s: &DMatrix<f64>) -> Vec<f64> {
    let d = s.nrows();
    let mut out: Vec<f64> = (0..d).map(|i| s[(i, i)]).collect();
    for i in 0..d {
        for j in 0..i {
            out.push(s[(i, j)]);
        }
    }
    out
}

/// Inverse of [`pack_flat`]; `flat` must hold `d(d+1)/2` entries.
pub(crate) fn unpack_flat(flat: &[f64], d: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    let mut k = d;
    for i in 0..d {
        m[(i, i)] = flat[i];
        for j in 0..i {
            m[(i, j)] = flat[k];
            m[(j, i)] = flat[k];
            k += 1;
        }
    }
    m
}
