use super::{least_squares_minnorm, EstimatorId, Predictor};
use crate::error::{Error, Result};
use crate::model::Dataset;

/// α = 1 + √(c/(4γ))·n^{−1/4}.
pub fn near_erm_alpha(c: f64, n: usize, d: usize) -> f64 {
    let gamma = d as f64 / n as f64;
    1.0 + (c / (4.0 * gamma)).sqrt() * (n as f64).powf(-0.25)
}

#[derive(Clone, Debug)]
pub struct NearErm {
    pub predictor: Predictor,
    pub ols: Predictor,
    pub alpha: f64,
    /// L̂(w_α) − L̂(ŵ).
    pub train_gap: f64,
    /// L(w_α) − L(ŵ).
    pub pop_gap: f64,
    /// (α − 1)²‖ŵ − w*‖²_Σ̂, equal to the training gap.
    pub train_gap_identity: f64,
}

/// w_α = w* + α(ŵ_OLS − w*), a near-minimizer of the training loss whose
/// population loss is noticeably worse than the ERM's.
pub fn near_erm_family(data: &Dataset, c: f64) -> Result<NearErm> {
    let (n, d) = data.x.dim();
    if d >= n {
        return Err(Error::arg("d", format!("near-ERM family needs d < n, got d = {d}, n = {n}")));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::arg("c", format!("must be finite and nonnegative, got {c}")));
    }
    let problem = &data.problem;
    let ols = least_squares_minnorm(data)?;
    let alpha = near_erm_alpha(c, n, d);
    let delta = &ols.w - &problem.w_star;
    let w = &problem.w_star + &(&delta * alpha);
    let xd = data.x.dot(&delta);
    let emp_excess = xd.dot(&xd) / n as f64;
    let train_gap = data.empirical_loss(w.view())? - ols.diagnostics.objective;
    let pop_gap = problem.population_loss(w.view())? - problem.population_loss(ols.w.view())?;
    let mut predictor = ols.clone();
    predictor.diagnostics.objective = ols.diagnostics.objective + train_gap;
    predictor.w = w;
    predictor.estimator = EstimatorId::NearErm;
    predictor.hyperparam = Some(c);
    Ok(NearErm { predictor, ols, alpha, train_gap, pop_gap, train_gap_identity: (alpha - 1.0).powi(2) * emp_excess })
}
