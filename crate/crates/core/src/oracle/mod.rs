//! Independent reference computations: numerical integration of the
//! marginal likelihood, brute-force splits and separability, convexity probes
//! and the golden fixtures derived from them.

mod convexity;
mod golden;
mod marginal;
pub mod quadrature;
mod separable;
mod split;

pub use convexity::{convexity_probe, random_admissible};
pub use golden::{check_fixtures, GoldenCase, GoldenCheck, GoldenFixtures, BUNDLED_FIXTURES};
pub use marginal::{monte_carlo_log_marginal, quadrature_log_marginal, MonteCarloEstimate, MAX_QUADRATURE_POINTS};
pub use quadrature::{Estimate, QuadratureSpec};
pub use separable::brute_force_separable;
pub use split::{brute_force_best_split, OracleSplit, ORACLE_SUBSET_LIMIT};
