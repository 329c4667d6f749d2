//! Least squares, ridge, norm-constrained ERM and the near-ERM family.

mod lasso;
mod lstsq;
mod near_erm;
mod ridge;

pub use lasso::{l1_constrained_erm, l1_constrained_erm_with, project_l1_ball, project_simplex, LassoOptions};
pub use lstsq::least_squares_minnorm;
pub use near_erm::{near_erm_alpha, near_erm_family, NearErm};
pub use ridge::{l2_constrained_erm, ridge_path, SpectralRidge};

use ndarray::Array1;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorId {
    MinNormLeastSquares,
    Ridge,
    L2Constrained,
    L1Constrained,
    NearErm,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Diagnostics {
    /// Training loss at the returned point.
    pub objective: f64,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub converged: bool,
    pub method: &'static str,
}

#[derive(Clone, Debug)]
pub struct Predictor {
    pub w: Array1<f64>,
    pub estimator: EstimatorId,
    /// λ, R or B depending on the estimator.
    pub hyperparam: Option<f64>,
    pub diagnostics: Diagnostics,
}

impl Predictor {
    pub fn norm2(&self) -> f64 {
        self.w.dot(&self.w).sqrt()
    }
}
