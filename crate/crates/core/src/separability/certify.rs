use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::simplex::LinearProgram;
use super::surface::{decode_surface, DecodedSurface};
use crate::error::{Error, Result};
use crate::expfam::{Dataset, ExpFamilyModel};
use crate::models::NormalModel;
use crate::partition::Partition;

/// LP margins at or below this (in standardized coordinates) count as
/// not separable.
pub const MARGIN_THRESHOLD: f64 = 1e-9;

/// `a·t + b ≥ margin` on the first set and `≤ −margin` on the second, with
/// `‖a‖₂ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub a: Vec<f64>,
    pub b: f64,
    pub margin: f64,
    pub normalized: bool,
}

impl Certificate {
    pub fn eval(&self, t: &[f64]) -> f64 {
        self.a.iter().zip(t).map(|(x, y)| x * y).sum::<f64>() + self.b
    }

    /// True when every vector of `first` evaluates to at least `margin` and
    /// every vector of `second` to at most `−margin`.
    pub fn replays(&self, first: &[Vec<f64>], second: &[Vec<f64>]) -> bool {
        first.iter().all(|t| self.eval(t) >= self.margin) && second.iter().all(|t| self.eval(t) <= -self.margin)
    }

    fn negated(self) -> Certificate {
        Certificate {
            a: self.a.into_iter().map(|v| -v).collect(),
            b: -self.b,
            ..self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Separation {
    Certified(Certificate),
    /// The optimal LP margin, `≤` [`MARGIN_THRESHOLD`].
    NotSeparable { margin: f64 },
}

impl Separation {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Separation::Certified(c) => Some(c),
            Separation::NotSeparable { .. } => None,
        }
    }

    pub fn is_separable(&self) -> bool {
        matches!(self, Separation::Certified(_))
    }
}

fn lex_cmp(x: &[Vec<f64>], y: &[Vec<f64>]) -> Ordering {
    for (u, v) in x.iter().zip(y) {
        for (a, b) in u.iter().zip(v) {
            match a.total_cmp(b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
    }
    x.len().cmp(&y.len())
}

/// Maximum-margin affine separation of two sets of statistic vectors.
///
/// Solves `max m` subject to `a·tᵢ + b ≥ m` on `tx`, `a·tⱼ + b ≤ −m` on `ty`
/// and `‖a‖_∞ ≤ 1`, after centering and scaling every coordinate to unit RMS.
/// The returned certificate is mapped back to the original coordinates,
/// rescaled to `‖a‖₂ = 1`, and its offset and margin are recomputed from the
/// inputs so that [`Certificate::replays`] holds exactly.
pub fn certify_t_linear(tx: &[Vec<f64>], ty: &[Vec<f64>]) -> Result<Separation> {
    if tx.is_empty() || ty.is_empty() {
        return Err(Error::usage("both sets must be nonempty"));
    }
    let p = tx[0].len();
    if p == 0 || tx.iter().chain(ty).any(|t| t.len() != p) {
        return Err(Error::usage("statistic vectors differ in length"));
    }
    if tx.iter().chain(ty).flatten().any(|v| !v.is_finite()) {
        return Err(Error::usage("statistic vectors must be finite"));
    }
    // solve in a canonical orientation so swapping the inputs negates exactly
    if lex_cmp(ty, tx) == Ordering::Less {
        return Ok(match solve(ty, tx)? {
            Separation::Certified(c) => Separation::Certified(c.negated()),
            other => other,
        });
    }
    solve(tx, ty)
}

/// Coordinates whose RMS spread is below this fraction of their mean
/// magnitude are left unscaled.
const RELATIVE_SPREAD_FLOOR: f64 = 1e-12;

fn solve(tx: &[Vec<f64>], ty: &[Vec<f64>]) -> Result<Separation> {
    let p = tx[0].len();
    let total = (tx.len() + ty.len()) as f64;
    let mut center = vec![0.0; p];
    for t in tx.iter().chain(ty) {
        for (c, v) in center.iter_mut().zip(t) {
            *c += v / total;
        }
    }
    let mut scale = vec![0.0; p];
    for t in tx.iter().chain(ty) {
        for j in 0..p {
            scale[j] += (t[j] - center[j]).powi(2) / total;
        }
    }
    for (s, c) in scale.iter_mut().zip(&center) {
        // a spread at rounding level is noise, not a feature to separate on
        let spread = s.sqrt();
        *s = if spread > RELATIVE_SPREAD_FLOOR * c.abs() && spread > 0.0 { spread } else { 1.0 };
    }
    let standardize = |t: &Vec<f64>| -> Vec<f64> { (0..p).map(|j| (t[j] - center[j]) / scale[j]).collect() };

    // variables: a⁺ (p), a⁻ (p), b⁺, b⁻, m
    let nvar = 2 * p + 3;
    let mut rows = Vec::with_capacity(tx.len() + ty.len() + 2 * p);
    for (sign, set) in [(1.0, tx), (-1.0, ty)] {
        for t in set {
            let z = standardize(t);
            let mut row = vec![0.0; nvar];
            for j in 0..p {
                row[j] = -sign * z[j];
                row[p + j] = sign * z[j];
            }
            row[2 * p] = -sign;
            row[2 * p + 1] = sign;
            row[2 * p + 2] = 1.0;
            rows.push(row);
        }
    }
    for j in 0..2 * p {
        let mut row = vec![0.0; nvar];
        row[j] = 1.0;
        rows.push(row);
    }
    let mut rhs = vec![0.0; tx.len() + ty.len()];
    rhs.extend(std::iter::repeat_n(1.0, 2 * p));
    let mut objective = vec![0.0; nvar];
    objective[2 * p + 2] = 1.0;

    let sol = LinearProgram { objective, rows, rhs }.solve()?;
    let lp_margin = sol.value;
    if !(lp_margin > MARGIN_THRESHOLD) {
        return Ok(Separation::NotSeparable {
            margin: lp_margin.max(0.0),
        });
    }

    let mut a: Vec<f64> = (0..p).map(|j| (sol.x[j] - sol.x[p + j]) / scale[j]).collect();
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    a.iter_mut().for_each(|v| *v /= norm);
    let dot = |t: &Vec<f64>| a.iter().zip(t).map(|(x, y)| x * y).sum::<f64>();
    let low_x = tx.iter().map(dot).fold(f64::INFINITY, f64::min);
    let high_y = ty.iter().map(dot).fold(f64::NEG_INFINITY, f64::max);
    let margin = (low_x - high_y) / 2.0;
    if !(margin > 0.0) {
        return Err(Error::SolverFailure(format!(
            "LP reported margin {lp_margin:e} but the recovered hyperplane does not separate"
        )));
    }
    let mut cert = Certificate {
        a,
        b: -(low_x + high_y) / 2.0,
        margin,
        normalized: true,
    };
    // the midpoint offset can round so that one side lands a hair short
    let lx = tx.iter().map(|t| cert.eval(t)).fold(f64::INFINITY, f64::min);
    let hy = ty.iter().map(|t| cert.eval(t)).fold(f64::NEG_INFINITY, f64::max);
    cert.margin = lx.min(-hy);
    if !(cert.margin > 0.0) {
        return Err(Error::SolverFailure("certificate lost its margin to rounding".into()));
    }
    Ok(Separation::Certified(cert))
}

/// One unordered block pair of a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCertificate {
    pub pair: [usize; 2],
    pub separable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    /// Certificate margin when separable, optimal LP margin otherwise.
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<DecodedSurface>,
}

impl PairCertificate {
    pub fn certificate(&self) -> Option<Certificate> {
        Some(Certificate {
            a: self.a.clone()?,
            b: self.b?,
            margin: self.margin,
            normalized: true,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateTable {
    pub pairs: Vec<PairCertificate>,
    pub all_separable: bool,
}

/// Statistic vectors of the points in `idx`.
pub fn statistic_vectors<M: ExpFamilyModel + ?Sized>(model: &M, data: &Dataset, idx: &[usize]) -> Vec<Vec<f64>> {
    idx.iter().map(|&i| model.suff_stat(data.point(i))).collect()
}

/// Certifies every unordered block pair `(i, j)`, `i < j`, of `partition`.
pub fn certify_partition(model: &NormalModel, data: &Dataset, partition: &Partition) -> Result<CertificateTable> {
    if partition.n() != data.n() {
        return Err(Error::usage("partition and data sizes differ"));
    }
    if model.dim() != data.dim() {
        return Err(Error::usage("model and data dimensions differ"));
    }
    let stats: Vec<Vec<Vec<f64>>> = partition
        .blocks()
        .iter()
        .map(|b| statistic_vectors(model, data, b))
        .collect();
    let k = stats.len();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
    let entries = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<PairCertificate> {
            Ok(match certify_t_linear(&stats[i], &stats[j])? {
                Separation::Certified(cert) => PairCertificate {
                    pair: [i, j],
                    separable: true,
                    surface: Some(decode_surface(&cert, model)?),
                    a: Some(cert.a),
                    b: Some(cert.b),
                    margin: cert.margin,
                },
                Separation::NotSeparable { margin } => PairCertificate {
                    pair: [i, j],
                    separable: false,
                    a: None,
                    b: None,
                    margin,
                    surface: None,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CertificateTable {
        all_separable: entries.iter().all(|e| e.separable),
        pairs: entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(rows: &[&[f64]]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn rounding_noise_in_a_constant_coordinate_is_ignored() {
        let tx = v(&[&[-4.500000000000001, 2.985, 0.2995], &[-4.5, 1.899, 2.3225]]);
        let ty = v(&[&[-4.5, -0.2995, 2.985], &[-4.5, -2.3225, 1.899]]);
        let cert = certify_t_linear(&tx, &ty).unwrap();
        let c = cert.certificate().expect("separable");
        assert!(c.replays(&tx, &ty));
        assert!(c.margin > 0.1);
    }

    #[test]
    fn one_dimensional_interval() {
        let tx = v(&[&[0.0], &[1.0]]);
        let ty = v(&[&[3.0]]);
        let cert = certify_t_linear(&tx, &ty).unwrap();
        let c = cert.certificate().unwrap();
        assert!((c.a[0] + 1.0).abs() < 1e-12);
        assert!((c.b - 2.0).abs() < 1e-12);
        assert!((c.margin - 1.0).abs() < 1e-12);
        assert!(c.replays(&tx, &ty));
    }

    #[test]
    fn identical_points_are_not_separable() {
        let s = certify_t_linear(&v(&[&[0.0, 0.0]]), &v(&[&[0.0, 0.0]])).unwrap();
        assert_eq!(s, Separation::NotSeparable { margin: 0.0 });
    }

    #[test]
    fn xor_is_not_separable() {
        let tx = v(&[&[0.0, 0.0], &[1.0, 1.0]]);
        let ty = v(&[&[0.0, 1.0], &[1.0, 0.0]]);
        match certify_t_linear(&tx, &ty).unwrap() {
            Separation::NotSeparable { margin } => assert!(margin.abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn swapping_negates() {
        let tx = v(&[&[0.0, 0.3], &[1.0, 0.2], &[0.4, 0.9]]);
        let ty = v(&[&[3.0, 3.1], &[2.5, 4.0]]);
        let a = certify_t_linear(&tx, &ty).unwrap().certificate().unwrap().clone();
        let b = certify_t_linear(&ty, &tx).unwrap().certificate().unwrap().clone();
        assert_eq!(a.margin, b.margin);
        assert_eq!(a.b, -b.b);
        assert!(a.a.iter().zip(&b.a).all(|(x, y)| *x == -*y));
    }

    #[test]
    fn usage_errors() {
        assert!(certify_t_linear(&[], &v(&[&[1.0]])).is_err());
        assert!(certify_t_linear(&v(&[&[1.0]]), &v(&[&[1.0, 2.0]])).is_err());
    }
}
