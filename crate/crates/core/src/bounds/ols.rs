use serde::Serialize;

use super::nonneg;
use crate::error::{Error, Result};
use crate::model::check_delta;

/// Mean σ²(n−1)/(n−d−1) and variance 2σ⁴d(n−1)/((n−d−1)²(n−d−3)) of L(ŵ_OLS).
pub fn ols_exact_moments(n: usize, d: usize, sigma2: f64) -> Result<(f64, f64)> {
    nonneg("sigma2", sigma2)?;
    if n < d + 4 {
        return Err(Error::arg("d", format!("need n - d - 3 > 0, got n = {n}, d = {d}")));
    }
    let (nf, df) = (n as f64, d as f64);
    let m1 = nf - df - 1.0;
    let mean = sigma2 * (nf - 1.0) / m1;
    let var = 2.0 * sigma2 * sigma2 * df * (nf - 1.0) / (m1 * m1 * (nf - df - 3.0));
    Ok((mean, var))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HighProbDeviation {
    /// Bound on L(ŵ_OLS) − σ².
    pub excess: f64,
    /// excess − σ²γ/(1−γ), the deviation above σ²/(1−γ).
    pub deviation: f64,
    /// K·σ²√(γ·log(36/δ)/n).
    pub summarized: f64,
    pub eps: f64,
    pub applicable: bool,
}

impl HighProbDeviation {
    /// Upper bound on L(ŵ_OLS).
    pub fn loss_bound(&self, sigma2: f64) -> f64 {
        sigma2 + self.excess
    }
}

/// With ε = 2√(log(32/δ)/n):
/// L − σ² ≤ σ²(√γ+ε)²/(√((1−ε)² − (√γ+ε)²) − ε)².
pub fn ols_highprob_deviation(gamma: f64, n: usize, delta: f64, sigma2: f64, k: f64) -> Result<HighProbDeviation> {
    nonneg("sigma2", sigma2)?;
    nonneg("k", k)?;
    check_delta(delta)?;
    if !(0.0..=0.999).contains(&gamma) {
        return Err(Error::arg("gamma", format!("must lie in [0, 0.999], got {gamma}")));
    }
    let nf = n as f64;
    let eps = 2.0 * ((32.0 / delta).ln() / nf).sqrt();
    let a = gamma.sqrt() + eps;
    let inner = (1.0 - eps).powi(2) - a * a;
    let den = if inner > 0.0 { inner.sqrt() - eps } else { f64::NAN };
    let applicable = eps < 1.0 && den > 0.0;
    let excess = if applicable { sigma2 * a * a / (den * den) } else { f64::INFINITY };
    Ok(HighProbDeviation {
        excess,
        deviation: excess - sigma2 * gamma / (1.0 - gamma),
        summarized: k * sigma2 * (gamma * (36.0 / delta).ln() / nf).sqrt(),
        eps,
        applicable,
    })
}

/// Default constant for the summarized form.
pub const HIGHPROB_K: f64 = 20.0;
