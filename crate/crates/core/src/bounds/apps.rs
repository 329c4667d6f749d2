use super::{nonneg, term, two_sided, BoundReport, Combine};
use crate::error::{Error, Result};
use crate::model::{beta1, beta1_min_n, check_delta, eps36};

/// Excess-risk bound 8(β₁+ε)σ² + 512(1+ε)(max_diag/φ²)σ²k·log(32d/δ)/n.
#[allow(clippy::too_many_arguments)]
pub fn lasso_compat_bound(
    sigma: f64,
    eps: f64,
    beta1: f64,
    phi2: f64,
    k: usize,
    d: usize,
    n: usize,
    delta: f64,
    max_diag: f64,
) -> Result<BoundReport> {
    nonneg("sigma", sigma)?;
    nonneg("eps", eps)?;
    nonneg("beta1", beta1)?;
    nonneg("max_diag", max_diag)?;
    check_delta(delta)?;
    if !(phi2 > 0.0) {
        return Err(Error::arg("phi2", format!("must be positive, got {phi2}")));
    }
    let s2 = sigma * sigma;
    let log_term = (32.0 * d as f64 / delta).ln();
    let ratio = max_diag / phi2;
    let fast = 512.0 * (1.0 + eps) * ratio * s2 * k as f64 * log_term / n as f64;
    Ok(BoundReport::build(
        "lasso_compat",
        1.0,
        Combine::Sum,
        vec![term("slow", 8.0 * (beta1 + eps) * s2), term("fast", fast)],
        delta,
        n as f64 > 32.0 * ratio * k as f64 * log_term,
    ))
}

fn check_gamma_below_one(gamma: f64) -> Result<()> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::arg("gamma", format!("must lie in [0, 1), got {gamma}")));
    }
    Ok(())
}

/// Two-sided interval on √(L − σ²) with a given ε:
/// center √(γL̂)/(1−γ), half-width ε√L̂ + √((L̂/(1−γ) − σ²)/(1−γ) + εL̂).
pub fn ols_interval_eps(emp_loss: f64, gamma: f64, eps: f64, sigma2: f64, delta: f64) -> Result<BoundReport> {
    nonneg("emp_loss", emp_loss)?;
    nonneg("eps", eps)?;
    nonneg("sigma2", sigma2)?;
    check_gamma_below_one(gamma)?;
    let q = 1.0 - gamma;
    let center = (gamma * emp_loss).sqrt() / q;
    let rad = (emp_loss / q - sigma2) / q + eps * emp_loss;
    let clamped = rad < 0.0;
    let half = eps * emp_loss.sqrt() + rad.max(0.0).sqrt();
    let mut r = two_sided("ols_interval", center, half, delta, true);
    if clamped {
        r.flags.push("radicand_clamped");
    }
    Ok(r)
}

/// Summarized form with ε = √(log(36/δ)/n).
pub fn ols_interval(emp_loss: f64, gamma: f64, n: usize, delta: f64, sigma2: f64) -> Result<BoundReport> {
    check_delta(delta)?;
    ols_interval_eps(emp_loss, gamma, eps36(n, delta), sigma2, delta)
}

/// The same interval with every constant kept:
/// [√(L−σ²) − a√L̂/D]² ≤ (b/D)(L̂/D − σ²), with b = (1+14ε)⁻¹,
/// a = √γ + 2ε and D = b − a².
pub fn ols_interval_explicit(emp_loss: f64, gamma: f64, n: usize, delta: f64, sigma2: f64) -> Result<BoundReport> {
    nonneg("emp_loss", emp_loss)?;
    nonneg("sigma2", sigma2)?;
    check_gamma_below_one(gamma)?;
    check_delta(delta)?;
    let eps = eps36(n, delta);
    let b = 1.0 / (1.0 + 14.0 * eps);
    let a = gamma.sqrt() + 2.0 * eps;
    let dd = b - a * a;
    if dd <= 0.0 {
        let mut r = two_sided("ols_interval_explicit", 0.0, f64::INFINITY, delta, false);
        r.lower = Some(f64::NEG_INFINITY);
        return Ok(r);
    }
    let center = a * emp_loss.sqrt() / dd;
    let rad = b / dd * (emp_loss / dd - sigma2);
    let mut r = two_sided("ols_interval_explicit", center, rad.max(0.0).sqrt(), delta, true);
    if rad < 0.0 {
        r.flags.push("radicand_clamped");
    }
    Ok(r)
}

fn check_gamma_above_one(gamma: f64) -> Result<()> {
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(Error::arg("gamma", format!("must exceed 1, got {gamma}")));
    }
    Ok(())
}

/// Two-sided interval on L(w) for interpolators under Σ = I.
pub fn isotropic_interp_interval(
    w_norm2_sq: f64,
    wstar_norm_sq: f64,
    sigma2: f64,
    gamma: f64,
    eps: f64,
) -> Result<BoundReport> {
    nonneg("w_norm2_sq", w_norm2_sq)?;
    nonneg("wstar_norm_sq", wstar_norm_sq)?;
    nonneg("sigma2", sigma2)?;
    nonneg("eps", eps)?;
    check_gamma_above_one(gamma)?;
    let center = sigma2 + w_norm2_sq + (1.0 - 2.0 / ((1.0 + eps) * gamma)) * wstar_norm_sq;
    let rad = (1.0 - 1.0 / gamma) * (w_norm2_sq - wstar_norm_sq / gamma) - sigma2 / gamma + 3.0 * eps * w_norm2_sq;
    let half = 2.0 * wstar_norm_sq.sqrt() * rad.max(0.0).sqrt();
    let mut r = two_sided("isotropic_interp", center, half, f64::NAN, rad >= 0.0);
    if rad < 0.0 {
        r.flags.push("radicand_negative");
    }
    Ok(r)
}

/// Interval on L(w) with the proof's constants: ε solves
/// (1+ε)^{−1/2} = (1+2ε₀)⁻¹((1+β₁)^{−1/2} − √(2log(18/δ)/n)) with
/// ε₀ = √(log(18/δ)/n) and β₁ at confidence δ/3, and the radicand is used
/// before simplification.
pub fn isotropic_interp_interval_explicit(
    w_norm2_sq: f64,
    wstar_norm_sq: f64,
    sigma2: f64,
    gamma: f64,
    n: usize,
    delta: f64,
) -> Result<BoundReport> {
    nonneg("w_norm2_sq", w_norm2_sq)?;
    nonneg("wstar_norm_sq", wstar_norm_sq)?;
    nonneg("sigma2", sigma2)?;
    check_gamma_above_one(gamma)?;
    check_delta(delta)?;
    let nf = n as f64;
    let e0 = ((18.0 / delta).ln() / nf).sqrt();
    let b1 = beta1(n, delta / 3.0);
    let a = ((1.0 + b1).powf(-0.5) - (2.0 * (18.0 / delta).ln() / nf).sqrt()) / (1.0 + 2.0 * e0);
    if a <= 0.0 {
        let mut r = two_sided("isotropic_interp_explicit", 0.0, f64::INFINITY, delta, false);
        r.lower = Some(f64::NEG_INFINITY);
        return Ok(r);
    }
    let eps = a.powi(-2) - 1.0;
    let g = (1.0 + eps) * gamma;
    let center = sigma2 + w_norm2_sq + (1.0 - 2.0 / g) * wstar_norm_sq;
    let rad = (1.0 - 1.0 / g) * (w_norm2_sq - wstar_norm_sq / g) - sigma2 / g;
    let half = 2.0 * wstar_norm_sq.sqrt() * rad.max(0.0).sqrt();
    let mut r = two_sided("isotropic_interp_explicit", center, half, delta, true);
    if rad < 0.0 {
        r.flags.push("radicand_clamped");
    }
    Ok(r)
}

/// (1+ε)(‖w*‖²/γ + σ²/(γ−1)).
pub fn isotropic_minnorm_norm_bound(gamma: f64, sigma2: f64, wstar_norm_sq: f64, eps: f64) -> Result<f64> {
    check_gamma_above_one(gamma)?;
    nonneg("sigma2", sigma2)?;
    nonneg("wstar_norm_sq", wstar_norm_sq)?;
    nonneg("eps", eps)?;
    Ok((1.0 + eps) * (wstar_norm_sq / gamma + sigma2 / (gamma - 1.0)))
}

/// OLS-shaped interval with γ replaced by the descent-cone ratio ω²/n.
/// Applicable when γ + 2ε/√n < 1.
pub fn lasso_isotropic_interval(
    emp_loss: f64,
    gamma_cone: f64,
    n: usize,
    delta: f64,
    sigma2: f64,
) -> Result<BoundReport> {
    check_delta(delta)?;
    let eps = eps36(n, delta);
    let ok = gamma_cone + 2.0 * eps / (n as f64).sqrt() < 1.0;
    if !ok || gamma_cone >= 1.0 {
        let mut r = two_sided("lasso_isotropic", 0.0, f64::INFINITY, delta, false);
        r.lower = Some(f64::NEG_INFINITY);
        return Ok(r);
    }
    let mut r = ols_interval_eps(emp_loss, gamma_cone, eps, sigma2, delta)?;
    r.name = "lasso_isotropic";
    Ok(r)
}

/// Limit of the excess risk, σ²γ/(1−γ).
pub fn lasso_isotropic_asymptote(gamma_cone: f64, sigma2: f64) -> f64 {
    sigma2 * gamma_cone / (1.0 - gamma_cone)
}

/// L(ŵ) − σ² ≤ (1+τ)σ²p/n with 1+τ = (1+2β₁)²/(1 − √(1+2β₁)·ρ)⁴, ρ = √(p/n).
pub fn low_complexity_bound(p: f64, n: usize, sigma2: f64, delta: f64) -> Result<BoundReport> {
    nonneg("p", p)?;
    nonneg("sigma2", sigma2)?;
    check_delta(delta)?;
    let nf = n as f64;
    if p / nf > 0.999 {
        return Err(Error::arg("p", format!("p/n = {} exceeds 0.999", p / nf)));
    }
    let b1 = beta1(n, delta);
    let rho = (p / nf).sqrt();
    let q = 1.0 - (1.0 + 2.0 * b1).sqrt() * rho;
    let ok = q > 0.0;
    let mult = if ok { (1.0 + 2.0 * b1).powi(2) / q.powi(4) } else { f64::INFINITY };
    Ok(BoundReport::build(
        "low_complexity",
        mult,
        Combine::Sum,
        vec![term("parametric", sigma2 * p / nf)],
        delta,
        ok && nf >= beta1_min_n(delta),
    ))
}

/// p = (√d + 2√log(36/δ))².
pub fn ols_lowcomplexity_p(d: usize, delta: f64) -> f64 {
    ((d as f64).sqrt() + 2.0 * (36.0 / delta).ln().sqrt()).powi(2)
}

/// p = 8k·max_diag·log(16d/δ)/φ².
pub fn lasso_lowcomplexity_p(k: usize, d: usize, max_diag: f64, phi2: f64, delta: f64) -> f64 {
    8.0 * k as f64 * max_diag * (16.0 * d as f64 / delta).ln() / phi2
}
