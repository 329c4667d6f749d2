//! Shared fixtures for the benchmarks in `benches/`.

use std::sync::Arc;

use ndarray::Array1;
use optrate_core::model::sample_dataset;
use optrate_core::{CovarianceSpec, Dataset, RegressionProblem};

/// n draws from the isotropic model with w* = e₁ and σ = 1.
pub fn isotropic_dataset(n: usize, d: usize, seed: u64) -> Dataset {
    let mut w = Array1::zeros(d);
    w[0] = 1.0;
    let p = Arc::new(RegressionProblem::new(1.0, w, CovarianceSpec::identity(d)).expect("valid problem"));
    sample_dataset(&p, n, seed).expect("sample")
}

/// k-sparse w* with unit entries.
pub fn sparse_wstar(d: usize, k: usize) -> Array1<f64> {
    Array1::from_shape_fn(d, |i| if i < k { 1.0 } else { 0.0 })
}
