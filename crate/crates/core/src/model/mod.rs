//! Covariance models, data generation, losses and confidence constants.

mod constants;
mod covariance;
mod problem;

pub(crate) use constants::check_delta;
pub use constants::{beta1, beta1_min_n, beta2, confidence_constants, eps36, ConfidenceConstants};
pub use covariance::{effective_ranks, split_covariance, CovSplit, CovarianceSpec, DenseCov, RANK_TOL};
pub use problem::{empirical_loss, population_loss, sample_dataset, Dataset, RegressionProblem};
