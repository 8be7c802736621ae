//! Exchangeable partition priors.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::partition::{self, bell};

/// An exchangeable partition probability function: the log-probability of a
/// partition depends only on the multiset of its block sizes.
pub trait EppfPrior: Send + Sync {
    /// `ln p_n` for a partition with the given block sizes (`n = Σ sizes`).
    fn log_eppf(&self, sizes: &[usize]) -> Result<f64>;
}

fn sorted_sizes(sizes: &[usize]) -> Result<Vec<usize>> {
    if sizes.is_empty() {
        return Err(Error::usage("sizes must be nonempty"));
    }
    if sizes.contains(&0) {
        return Err(Error::usage("block sizes must be positive"));
    }
    let mut s = sizes.to_vec();
    s.sort_unstable();
    Ok(s)
}

/// Chinese Restaurant Process with concentration `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crp {
    alpha: f64,
}

impl Crp {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::usage(format!("CRP concentration must be positive, got {alpha}")));
        }
        Ok(Crp { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// `ln[α^K / α^(n) · Π (|I| − 1)!]`, rising factorial via `ln Γ`.
pub fn crp_log_eppf(alpha: f64, sizes: &[usize]) -> Result<f64> {
    let crp = Crp::new(alpha)?;
    crp.log_eppf(sizes)
}

impl EppfPrior for Crp {
    fn log_eppf(&self, sizes: &[usize]) -> Result<f64> {
        let sizes = sorted_sizes(sizes)?;
        let n: usize = sizes.iter().sum();
        if n == 1 {
            return Ok(0.0);
        }
        let k = sizes.len() as f64;
        let rising = ln_gamma(self.alpha + n as f64) - ln_gamma(self.alpha);
        let factorials: f64 = sizes.iter().map(|&s| ln_gamma(s as f64)).sum();
        Ok(k * self.alpha.ln() - rising + factorials)
    }
}

/// Uniform distribution over the `Bell(n)` partitions of `n` items.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct UniformPartitions;

impl EppfPrior for UniformPartitions {
    fn log_eppf(&self, sizes: &[usize]) -> Result<f64> {
        let sizes = sorted_sizes(sizes)?;
        let n: usize = sizes.iter().sum();
        Ok(-bell(n).ln())
    }
}

/// `Σ_partitions exp(ln p_n)`; a validation helper for `n ≤ 12`.
pub fn eppf_total_mass<P: EppfPrior + ?Sized>(prior: &P, n: usize) -> Result<f64> {
    partition::check_cap(n, partition::DEFAULT_ENUMERATION_CAP)?;
    let mut total = 0.0;
    for p in partition::enumerate_partitions(n, partition::DEFAULT_ENUMERATION_CAP)? {
        total += prior.log_eppf(&p.sizes())?.exp();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_partitions;
    use proptest::prelude::*;

    #[test]
    fn formula_examples() {
        for alpha in [0.1, 1.0, 7.0] {
            assert_eq!(crp_log_eppf(alpha, &[1]).unwrap(), 0.0);
        }
        assert!((crp_log_eppf(1.0, &[3]).unwrap() - (1.0f64 / 3.0).ln()).abs() < 1e-14);
        assert!((crp_log_eppf(1.0, &[1, 1, 1]).unwrap() - (1.0f64 / 6.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn usage_errors() {
        assert!(matches!(crp_log_eppf(0.0, &[1]), Err(Error::Usage(_))));
        assert!(matches!(crp_log_eppf(-1.0, &[1]), Err(Error::Usage(_))));
        assert!(matches!(crp_log_eppf(1.0, &[]), Err(Error::Usage(_))));
        assert!(matches!(crp_log_eppf(1.0, &[2, 0]), Err(Error::Usage(_))));
    }

    #[test]
    fn total_mass_small_cases() {
        let crp = Crp::new(1.0).unwrap();
        // 1/3 + 3·(1/6) + 1/6
        assert!((eppf_total_mass(&crp, 3).unwrap() - 1.0).abs() < 1e-14);
        assert!((eppf_total_mass(&crp, 1).unwrap() - 1.0).abs() < 1e-15);
        let crp = Crp::new(0.5).unwrap();
        assert!((eppf_total_mass(&crp, 8).unwrap() - 1.0).abs() < 1e-10);
        assert!((eppf_total_mass(&UniformPartitions, 7).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(eppf_total_mass(&crp, 13), Err(Error::CapExceeded { .. })));
    }

    /// Probability of a partition built by seating customers one at a time.
    fn sequential_seating(alpha: f64, assignment: &[usize]) -> f64 {
        let mut sizes: Vec<usize> = Vec::new();
        let mut prob = 1.0;
        for (i, &l) in assignment.iter().enumerate() {
            let denom = alpha + i as f64;
            if l == sizes.len() {
                prob *= alpha / denom;
                sizes.push(1);
            } else {
                prob *= sizes[l] as f64 / denom;
                sizes[l] += 1;
            }
        }
        prob
    }

    #[test]
    fn matches_sequential_seating() {
        for alpha in [0.5, 1.0, 2.0] {
            for n in 1..=6 {
                for p in enumerate_partitions(n, 12).unwrap() {
                    let direct = crp_log_eppf(alpha, &p.sizes()).unwrap().exp();
                    let seq = sequential_seating(alpha, p.assignment());
                    assert!((direct - seq).abs() < 1e-12, "{alpha} {p:?}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn exchangeable(sizes in proptest::collection::vec(1usize..6, 1..7), alpha in 0.05f64..10.0, rot in 0usize..7) {
            let a = crp_log_eppf(alpha, &sizes).unwrap();
            let mut shuffled = sizes.clone();
            let len = shuffled.len();
            shuffled.rotate_left(rot % len);
            shuffled.reverse();
            prop_assert_eq!(a, crp_log_eppf(alpha, &shuffled).unwrap());
        }
    }
}
