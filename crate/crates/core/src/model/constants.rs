use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConfidenceConstants {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    /// n ≥ 196·log(12/δ).
    pub beta1_valid: bool,
    /// β₂ ≤ 1.
    pub beta2_valid: bool,
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::arg("delta", format!("must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

pub fn beta1(n: usize, delta: f64) -> f64 {
    14.0 * ((12.0 / delta).ln() / n as f64).sqrt()
}

pub fn beta1_min_n(delta: f64) -> f64 {
    196.0 * (12.0 / delta).ln()
}

pub fn beta2(n: usize, delta: f64, rank1: usize) -> f64 {
    let n = n as f64;
    32.0 * (((1.0 / delta).ln() / n).sqrt() + (rank1 as f64 / n).sqrt())
}

pub fn eps36(n: usize, delta: f64) -> f64 {
    ((36.0 / delta).ln() / n as f64).sqrt()
}

pub fn confidence_constants(n: usize, delta: f64, rank1: usize) -> Result<ConfidenceConstants> {
    check_delta(delta)?;
    if n == 0 {
        return Err(Error::arg("n", "must be at least 1"));
    }
    let b1 = beta1(n, delta);
    let b2 = beta2(n, delta, rank1);
    Ok(ConfidenceConstants {
        beta1: b1,
        beta2: b2,
        eps: eps36(n, delta),
        beta1_valid: n as f64 >= beta1_min_n(delta),
        beta2_valid: b2 <= 1.0,
    })
}
