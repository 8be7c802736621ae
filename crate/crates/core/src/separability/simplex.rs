//! Dense tableau simplex for `max cᵀx  s.t.  Ax ≤ b, x ≥ 0` with `b ≥ 0`.
//!
//! Bland's rule (lowest-index entering and leaving variables) rules out
//! cycling on the degenerate problems the separability LP produces.

use crate::error::{Error, Result};

const EPS: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn solve(&self) -> Result<LpSolution> {
        let n = self.objective.len();
        let m = self.rows.len();
        if self.rhs.len() != m || self.rows.iter().any(|r| r.len() != n) {
            return Err(Error::usage("LP dimensions are inconsistent"));
        }
        if self.rhs.iter().any(|&b| !(b >= 0.0)) {
            return Err(Error::usage("LP right-hand side must be nonnegative"));
        }
        let all = self.objective.iter().chain(self.rows.iter().flatten()).chain(&self.rhs);
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::SolverFailure("non-finite LP coefficients".into()));
        }

        let width = n + m + 1;
        // rows 0..m: constraints with slack identity; row m: reduced costs
        let mut t = vec![vec![0.0; width]; m + 1];
        for (i, row) in self.rows.iter().enumerate() {
            t[i][..n].copy_from_slice(row);
            t[i][n + i] = 1.0;
            t[i][width - 1] = self.rhs[i];
        }
        for (j, &c) in self.objective.iter().enumerate() {
            t[m][j] = -c;
        }
        let mut basis: Vec<usize> = (n..n + m).collect();

        let max_pivots = 50 * (n + m).max(10);
        let mut pivots = 0;
        while let Some(enter) = (0..n + m).find(|&j| t[m][j] < -EPS) {
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = t[i][enter];
                if a > EPS {
                    let ratio = t[i][width - 1] / a;
                    let replace = match leave {
                        None => true,
                        Some((r, best)) => {
                            ratio < best - EPS || (ratio <= best + EPS && basis[i] < basis[r])
                        }
                    };
                    if replace {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Err(Error::SolverFailure(format!("LP is unbounded along column {enter}")));
            };
            pivot(&mut t, r, enter);
            basis[r] = enter;
            pivots += 1;
            if pivots > max_pivots {
                return Err(Error::SolverFailure(format!("no convergence after {pivots} pivots")));
            }
        }

        let mut x = vec![0.0; n];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < n {
                x[bv] = t[i][width - 1];
            }
        }
        let value = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { x, value, pivots })
    }
}

fn pivot(t: &mut [Vec<f64>], r: usize, c: usize) {
    let p = t[r][c];
    t[r].iter_mut().for_each(|v| *v /= p);
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let f = row[c];
        if f != 0.0 {
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            row[c] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let lp = LinearProgram {
            objective: vec![3.0, 5.0],
            rows: vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 2.0]],
            rhs: vec![4.0, 12.0, 18.0],
        };
        let s = lp.solve().unwrap();
        assert!((s.value - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example under the textbook rule
        let lp = LinearProgram {
            objective: vec![0.75, -150.0, 0.02, -6.0],
            rows: vec![
                vec![0.25, -60.0, -0.04, 9.0],
                vec![0.5, -90.0, -0.02, 3.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            rhs: vec![0.0, 0.0, 1.0],
        };
        let s = lp.solve().unwrap();
        assert!((s.value - 0.05).abs() < 1e-12);
    }

    #[test]
    fn unbounded_and_bad_input() {
        let lp = LinearProgram {
            objective: vec![1.0],
            rows: vec![vec![-1.0]],
            rhs: vec![1.0],
        };
        assert!(matches!(lp.solve(), Err(Error::SolverFailure(_))));
        let lp = LinearProgram {
            objective: vec![1.0],
            rows: vec![vec![1.0]],
            rhs: vec![-1.0],
        };
        assert!(matches!(lp.solve(), Err(Error::Usage(_))));
    }
}
