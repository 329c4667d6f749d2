use ndarray::ArrayView1;

use super::{nonneg, term, BoundReport, Combine};
use crate::error::{check_dim, Result};
use crate::model::{beta1, beta1_min_n, beta2, check_delta, CovSplit};
use crate::widths::{radius_under_cov, width_ball, ConstraintSet, SetKind, WidthEstimate};

/// (1+β₁)(√L̂ + F/√n)².
pub fn optimistic_bound(emp_loss: f64, f_value: f64, n: usize, delta: f64) -> Result<BoundReport> {
    nonneg("emp_loss", emp_loss)?;
    nonneg("F", f_value)?;
    check_delta(delta)?;
    let nf = n as f64;
    Ok(BoundReport::build(
        "optimistic",
        1.0 + beta1(n, delta),
        Combine::ScaledSquare,
        vec![term("sqrt_emp_loss", emp_loss.sqrt()), term("complexity", f_value / nf.sqrt())],
        delta,
        nf >= beta1_min_n(delta),
    ))
}

/// Everything the covariance-split bounds need about (Σ₂, K, w*), evaluated
/// once for the unit ball of the chosen norm.
#[derive(Clone, Debug)]
pub struct SplitContext {
    pub split: CovSplit,
    pub kind: SetKind,
    /// W_{Σ₂}(K₁) = E‖x‖_* with x ∼ N(0, Σ₂).
    pub unit_width: WidthEstimate,
    /// rad(Σ₂^{1/2}K₁) = sup over K₁ of ‖u‖_{Σ₂}.
    pub unit_radius: f64,
    /// ‖w*‖_{Σ₂}.
    pub wstar_sigma2: f64,
}

impl SplitContext {
    pub fn new(split: CovSplit, kind: SetKind, wstar: ArrayView1<f64>, mc_samples: usize, seed: u64) -> Result<Self> {
        let unit = ConstraintSet { kind, radius: 1.0 };
        let w = width_ball(&split.sigma2, unit, mc_samples, seed)?;
        Self::with_width(split, kind, wstar, w)
    }

    pub fn with_width(
        split: CovSplit,
        kind: SetKind,
        wstar: ArrayView1<f64>,
        unit_width: WidthEstimate,
    ) -> Result<Self> {
        check_dim(split.sigma2.dim(), wstar.len())?;
        let unit_radius = radius_under_cov(&split.sigma2, ConstraintSet { kind, radius: 1.0 })?;
        let wstar_sigma2 = split.sigma2.quad_form(wstar)?.max(0.0).sqrt();
        Ok(SplitContext { split, kind, unit_width, unit_radius, wstar_sigma2 })
    }

    pub fn beta2(&self, n: usize, delta: f64) -> f64 {
        beta2(n, delta, self.split.rank1)
    }
}

fn conf_factor(n: usize, delta: f64) -> f64 {
    (2.0 * (32.0 / delta).ln() / n as f64).sqrt()
}

/// (1+β₂)(√L̂ + αW_{Σ₂}(K)/√n + [‖w*‖_{Σ₂} + α·rad(Σ₂^{1/2}K)]√(2log(32/δ)/n))².
pub fn cov_split_bound(
    emp_loss: f64,
    set: ConstraintSet,
    ctx: &SplitContext,
    n: usize,
    delta: f64,
    alpha: f64,
) -> Result<BoundReport> {
    nonneg("emp_loss", emp_loss)?;
    nonneg("alpha", alpha)?;
    nonneg("radius", set.radius)?;
    check_delta(delta)?;
    let b2 = ctx.beta2(n, delta);
    let scale = alpha * set.radius;
    let c = conf_factor(n, delta);
    Ok(BoundReport::build(
        "cov_split",
        1.0 + b2,
        Combine::ScaledSquare,
        vec![
            term("sqrt_emp_loss", emp_loss.sqrt()),
            term("width", scale * ctx.unit_width.value / (n as f64).sqrt()),
            term("wstar_confidence", ctx.wstar_sigma2 * c),
            term("radius_confidence", scale * ctx.unit_radius * c),
        ],
        delta,
        b2 <= 1.0,
    ))
}

/// C_{Σ₂}(‖w‖) = ‖w‖W_{Σ₂}(K₁)/√n + [‖w*‖_{Σ₂} + ‖w‖·rad(Σ₂^{1/2}K₁)]√(2log(32/δ)/n).
pub fn c_functional(norm_w: f64, ctx: &SplitContext, n: usize, delta: f64) -> Result<f64> {
    nonneg("norm_w", norm_w)?;
    check_delta(delta)?;
    let c = conf_factor(n, delta);
    Ok(norm_w * ctx.unit_width.value / (n as f64).sqrt() + (ctx.wstar_sigma2 + norm_w * ctx.unit_radius) * c)
}

/// (σ + 5(ε+β₂)·max(σ, 1))².
pub fn flatness_bound(sigma: f64, eps: f64, beta2: f64) -> Result<f64> {
    nonneg("sigma", sigma)?;
    nonneg("eps", eps)?;
    nonneg("beta2", beta2)?;
    Ok((sigma + 5.0 * (eps + beta2) * sigma.max(1.0)).powi(2))
}

/// (1+3β₂)(σ + (‖w*‖/√n)(E‖x‖_* + rad·√(8log(36/δ))))².
pub fn optimally_tuned_bound(
    sigma: f64,
    wstar_norm: f64,
    ctx: &SplitContext,
    n: usize,
    delta: f64,
) -> Result<BoundReport> {
    nonneg("sigma", sigma)?;
    nonneg("wstar_norm", wstar_norm)?;
    check_delta(delta)?;
    let b2 = ctx.beta2(n, delta);
    let rn = (n as f64).sqrt();
    Ok(BoundReport::build(
        "optimally_tuned",
        1.0 + 3.0 * b2,
        Combine::ScaledSquare,
        vec![
            term("sigma", sigma),
            term("width", wstar_norm * ctx.unit_width.value / rn),
            term("confidence", wstar_norm * ctx.unit_radius * (8.0 * (36.0 / delta).ln()).sqrt() / rn),
        ],
        delta,
        b2 <= 1.0,
    ))
}

/// (1+3β₂)(σ + √(32log(36/δ)·‖w*‖₂²Tr(Σ₂)/n))².
pub fn optimally_tuned_ridge_bound(
    sigma: f64,
    wstar_norm: f64,
    split: &CovSplit,
    n: usize,
    delta: f64,
) -> Result<BoundReport> {
    nonneg("sigma", sigma)?;
    nonneg("wstar_norm", wstar_norm)?;
    check_delta(delta)?;
    let b2 = beta2(n, delta, split.rank1);
    let t = (32.0 * (36.0 / delta).ln() * wstar_norm * wstar_norm * split.sigma2.trace() / n as f64).sqrt();
    Ok(BoundReport::build(
        "optimally_tuned_ridge",
        1.0 + 3.0 * b2,
        Combine::ScaledSquare,
        vec![term("sigma", sigma), term("capacity", t)],
        delta,
        b2 <= 1.0,
    ))
}
