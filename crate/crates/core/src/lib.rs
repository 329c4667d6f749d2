//! Gaussian linear-regression workbench: estimators, optimistic-rate
//! generalization bounds, Gaussian-width oracles and a seeded Monte Carlo
//! harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate blas_src;

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod rng;
pub mod widths;

pub use error::{Error, Result};
pub use model::{CovSplit, CovarianceSpec, Dataset, RegressionProblem};
