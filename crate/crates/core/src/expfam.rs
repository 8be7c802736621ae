//! Canonical conjugate exponential families.
//!
//! A component density is `g_θ(x) = h(x) exp{T(x)·η(θ) − a·B(θ)}` and the
//! conjugate prior is `π(θ) ∝ H(θ) exp{η(θ)·χ − B(θ)·τ}` with log-normalizer
//! `A(χ, τ)`. Observing `u_1..u_k` moves the prior to `(χ + Σ T(u_i), τ + k a)`
//! and the marginal density of the cluster is
//!
//! ```text
//! ln f_k(u) = Σ ln h(u_i) + A(χ + Σ T(u_i), τ + k a) − A(χ, τ)
//! ```
//!
//! Concrete models only provide `T`, `ln h`, `a`, the prior point and a
//! closed form of `A`; `η`, `B` and `H` are never evaluated.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::partition::Partition;

/// A point `(χ, τ)` of the conjugate-prior parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct NaturalParams {
    pub chi: Vec<f64>,
    pub tau: Vec<f64>,
}

impl NaturalParams {
    pub fn new(chi: Vec<f64>, tau: Vec<f64>) -> Self {
        Self { chi, tau }
    }

    pub fn is_finite(&self) -> bool {
        self.chi.iter().chain(&self.tau).all(|v| v.is_finite())
    }

    /// `λ·self + (1 − λ)·other`.
    pub fn mix(&self, other: &NaturalParams, lambda: f64) -> NaturalParams {
        let lerp = |a: &[f64], b: &[f64]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| lambda * x + (1.0 - lambda) * y)
                .collect()
        };
        NaturalParams {
            chi: lerp(&self.chi, &other.chi),
            tau: lerp(&self.tau, &other.tau),
        }
    }

    /// Concatenation `[χ, τ]`.
    pub fn flatten(&self) -> Vec<f64> {
        self.chi.iter().chain(&self.tau).copied().collect()
    }
}

/// Contract satisfied by every concrete model.
pub trait ExpFamilyModel: Send + Sync {
    /// Data dimension `d`.
    fn dim(&self) -> usize;

    /// Length `p` of the sufficient statistic (and of `χ`).
    fn stat_dim(&self) -> usize;

    /// Length `q` of `a` (and of `τ`).
    fn tau_dim(&self) -> usize;

    /// Writes `T(x)` into `out` (length `p`).
    fn suff_stat_into(&self, x: &[f64], out: &mut [f64]);

    fn log_h(&self, x: &[f64]) -> f64;

    /// The per-observation increment `a` of `τ`.
    fn tau_increment(&self) -> &[f64];

    fn prior(&self) -> &NaturalParams;

    /// `A(prior)`, cached at construction.
    fn log_partition_prior(&self) -> f64;

    /// Closed-form `A(χ, τ)`; a domain error outside the admissible set.
    fn log_partition(&self, params: &NaturalParams) -> Result<f64>;

    fn in_domain(&self, params: &NaturalParams) -> bool {
        params.chi.len() == self.stat_dim()
            && params.tau.len() == self.tau_dim()
            && params.is_finite()
            && self.log_partition(params).is_ok()
    }

    fn suff_stat(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.stat_dim()];
        self.suff_stat_into(x, &mut out);
        out
    }
}

/// `n` pairwise-distinct points in `R^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    n: usize,
    d: usize,
}

impl Dataset {
    /// Builds a dataset, rejecting duplicates.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(rows, None)
    }

    /// Builds a dataset; a row equal to an earlier row is shifted by
    /// `j·epsilon` in every coordinate for the smallest `j ≥ 1` making it
    /// distinct.
    pub fn with_jitter(rows: Vec<Vec<f64>>, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::usage("jitter epsilon must be finite and positive"));
        }
        Self::build(rows, Some(epsilon))
    }

    fn build(rows: Vec<Vec<f64>>, jitter: Option<f64>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::usage("points must have at least one coordinate"));
        }
        let mut values = Vec::with_capacity(n * d);
        for (row, r) in rows.iter().enumerate() {
            if r.len() != d {
                return Err(Error::RaggedRow {
                    row,
                    expected: d,
                    found: r.len(),
                });
            }
            if let Some(col) = r.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonNumeric {
                    row,
                    col,
                    cell: r[col].to_string(),
                });
            }
            // -0.0 and 0.0 are the same point
            values.extend(r.iter().map(|&v| if v == 0.0 { 0.0 } else { v }));
        }
        let mut data = Dataset { values, n, d };
        match jitter {
            None => {
                if let Some((first, row)) = data.first_duplicate() {
                    return Err(Error::DuplicatePoint { row, first });
                }
            }
            Some(eps) => data.jitter_duplicates(eps),
        }
        Ok(data)
    }

    fn row_cmp(&self, a: usize, b: usize) -> Ordering {
        self.point(a)
            .iter()
            .zip(self.point(b))
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }

    /// Smallest pair `(first, row)` with `first < row` and equal points.
    fn first_duplicate(&self) -> Option<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| self.row_cmp(a, b).then(a.cmp(&b)));
        let mut best: Option<(usize, usize)> = None;
        for w in order.windows(2) {
            if self.row_cmp(w[0], w[1]).is_eq() {
                let cand = (w[0], w[1]);
                if best.is_none_or(|b| cand.1 < b.1) {
                    best = Some(cand);
                }
            }
        }
        best
    }

    fn jitter_duplicates(&mut self, eps: f64) {
        for i in 1..self.n {
            let original = self.point(i).to_vec();
            let mut j = 0u32;
            while (0..i).any(|k| self.row_cmp(k, i).is_eq()) {
                j += 1;
                let shift = eps * f64::from(j);
                let d = self.d;
                for (c, v) in self.values[i * d..(i + 1) * d].iter_mut().enumerate() {
                    *v = original[c] + shift;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }

    /// Dataset whose row `i` is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Dataset> {
        check_permutation(perm, self.n)?;
        let rows = perm.iter().map(|&i| self.point(i).to_vec()).collect();
        Dataset::new(rows)
    }
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::usage("permutation length mismatch"));
    }
    for &i in perm {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::usage("not a permutation"));
        }
    }
    Ok(())
}

/// Sorted copy of `subset`, validated against `n`.
fn canonical_subset(subset: &[usize], n: usize) -> Result<Vec<usize>> {
    if subset.is_empty() {
        return Err(Error::usage("subset must be nonempty"));
    }
    let mut idx = subset.to_vec();
    idx.sort_unstable();
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::usage("subset contains repeated indices"));
    }
    if *idx.last().unwrap() >= n {
        return Err(Error::usage(format!(
            "subset index {} out of range for n = {n}",
            idx.last().unwrap()
        )));
    }
    Ok(idx)
}

fn check_dims<M: ExpFamilyModel + ?Sized>(model: &M, data: &Dataset) -> Result<()> {
    if model.dim() != data.dim() {
        return Err(Error::usage(format!(
            "model dimension {} does not match data dimension {}",
            model.dim(),
            data.dim()
        )));
    }
    Ok(())
}

/// `(χ + Σ_{i∈subset} T(x_i), τ + |subset|·a)`, summed in ascending index order.
pub fn posterior_params<M: ExpFamilyModel + ?Sized>(
    model: &M,
    subset: &[usize],
    data: &Dataset,
) -> Result<NaturalParams> {
    check_dims(model, data)?;
    let idx = canonical_subset(subset, data.n())?;
    let post = update(model, model.prior(), &idx, data);
    if !model.in_domain(&post) {
        return Err(Error::ModelInconsistency(format!(
            "posterior after {} observations left the admissible set",
            idx.len()
        )));
    }
    Ok(post)
}

/// Update without validation; `idx` must already be canonical.
pub(crate) fn update<M: ExpFamilyModel + ?Sized>(
    model: &M,
    start: &NaturalParams,
    idx: &[usize],
    data: &Dataset,
) -> NaturalParams {
    let mut chi = start.chi.clone();
    let mut t = vec![0.0; model.stat_dim()];
    for &i in idx {
        model.suff_stat_into(data.point(i), &mut t);
        for (c, v) in chi.iter_mut().zip(&t) {
            *c += v;
        }
    }
    let k = idx.len() as f64;
    let tau = start
        .tau
        .iter()
        .zip(model.tau_increment())
        .map(|(t, a)| t + k * a)
        .collect();
    NaturalParams { chi, tau }
}

/// `ln f_k(x_subset)`.
pub fn log_marginal<M: ExpFamilyModel + ?Sized>(
    model: &M,
    subset: &[usize],
    data: &Dataset,
) -> Result<f64> {
    check_dims(model, data)?;
    let idx = canonical_subset(subset, data.n())?;
    let post = update(model, model.prior(), &idx, data);
    let a_post = model.log_partition(&post).map_err(|e| match e {
        Error::Domain(msg) => Error::ModelInconsistency(msg),
        other => other,
    })?;
    let log_h: f64 = idx.iter().map(|&i| model.log_h(data.point(i))).sum();
    Ok(log_h + (a_post - model.log_partition_prior()))
}

/// `Σ_{I ∈ partition} ln f_{|I|}(x_I)`, blocks in canonical label order.
pub fn log_marginal_partition<M: ExpFamilyModel + ?Sized>(
    model: &M,
    partition: &Partition,
    data: &Dataset,
) -> Result<f64> {
    if partition.n() != data.n() {
        return Err(Error::usage(format!(
            "partition covers {} items but data has {} points",
            partition.n(),
            data.n()
        )));
    }
    let values = partition
        .blocks()
        .iter()
        .map(|b| log_marginal(model, b, data))
        .collect::<Result<Vec<_>>>()?;
    Ok(values.iter().sum())
}
