use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{beta1, check_delta};
use crate::widths::{golden_min, LocalizedWidth};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

/// ψ±(r) = max{0, (1±β₁)√(σ²+r²) − W_Σ(K_r)/√n ± C·r·√(log(2/δ)/n)}.
#[derive(Clone)]
pub struct SummaryFunctional {
    pub sign: Sign,
    pub delta: f64,
    pub sigma: f64,
    pub n: usize,
    pub c: f64,
    pub beta1: f64,
    /// Recompute β₁ from (n, δ) when δ changes.
    pub beta1_auto: bool,
    pub width: Arc<dyn LocalizedWidth>,
    /// Shift Monte Carlo widths by 3 standard errors in the direction that
    /// loosens the functional.
    pub inflate_mc: bool,
}

impl fmt::Debug for SummaryFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SummaryFunctional")
            .field("sign", &self.sign)
            .field("delta", &self.delta)
            .field("sigma", &self.sigma)
            .field("n", &self.n)
            .field("c", &self.c)
            .field("beta1", &self.beta1)
            .field("inflate_mc", &self.inflate_mc)
            .finish_non_exhaustive()
    }
}

impl SummaryFunctional {
    pub fn new(sign: Sign, delta: f64, sigma: f64, n: usize, width: Arc<dyn LocalizedWidth>) -> Result<Self> {
        check_delta(delta)?;
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::arg("sigma", format!("must be finite and nonnegative, got {sigma}")));
        }
        if n == 0 {
            return Err(Error::arg("n", "must be at least 1"));
        }
        Ok(SummaryFunctional {
            sign,
            delta,
            sigma,
            n,
            c: std::f64::consts::SQRT_2,
            beta1: beta1(n, delta),
            beta1_auto: true,
            width,
            inflate_mc: true,
        })
    }

    /// β₁ = 0 and C = 0: the n → ∞ shape √(σ²+r²) − W_Σ(K_r)/√n.
    pub fn limiting(sign: Sign, sigma: f64, n: usize, width: Arc<dyn LocalizedWidth>) -> Result<Self> {
        let mut f = SummaryFunctional::new(sign, 0.5, sigma, n, width)?;
        f.beta1 = 0.0;
        f.beta1_auto = false;
        f.c = 0.0;
        f.inflate_mc = false;
        Ok(f)
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        let mut f = self.clone();
        f.delta = delta;
        if f.beta1_auto {
            f.beta1 = beta1(f.n, delta);
        }
        Ok(f)
    }

    pub fn with_sign(&self, sign: Sign) -> Self {
        SummaryFunctional { sign, ..self.clone() }
    }
}

/// +∞ where K_r is empty.
pub fn psi_eval(f: &SummaryFunctional, r: f64) -> f64 {
    if r < f.width.min_radius() {
        return f64::INFINITY;
    }
    let w = f.width.width(r);
    if w.is_empty() {
        return f64::INFINITY;
    }
    let nf = f.n as f64;
    let s = match f.sign {
        Sign::Plus => 1.0,
        Sign::Minus => -1.0,
    };
    let width = if f.inflate_mc { w.value - s * 3.0 * w.std_error } else { w.value };
    let v = (1.0 + s * f.beta1) * (f.sigma * f.sigma + r * r).sqrt() - width / nf.sqrt()
        + s * f.c * r * ((2.0 / f.delta).ln() / nf).sqrt();
    v.max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PsiMin {
    pub r_star: f64,
    pub mu_star: f64,
}

/// 10·(σ + rad K).
pub fn default_r_max(sigma: f64, rad: f64) -> f64 {
    10.0 * (sigma + rad)
}

fn check_r_max(f: &SummaryFunctional, r_max: f64) -> Result<f64> {
    let lo = f.width.min_radius();
    if !(r_max.is_finite() && r_max >= lo) {
        return Err(Error::arg("r_max", format!("must be finite and at least {lo}, got {r_max}")));
    }
    Ok(lo)
}

/// Leftmost minimizer of a convex functional over [min_radius, r_max].
pub fn psi_minimize(f: &SummaryFunctional, r_max: f64) -> Result<PsiMin> {
    let lo = check_r_max(f, r_max)?;
    let tol = 1e-6 * r_max.max(f64::MIN_POSITIVE);
    let (x, v) = if r_max > lo { golden_min(|r| psi_eval(f, r), lo, r_max, tol) } else { (lo, psi_eval(f, lo)) };
    let (mut x, mut v) = (x, v);
    for cand in [lo, r_max] {
        let fc = psi_eval(f, cand);
        if fc < v {
            x = cand;
            v = fc;
        }
    }
    if !v.is_finite() {
        return Err(Error::arg("r_max", "localized set is empty on the whole search range"));
    }
    let slack = 1e-12 * v.max(1.0);
    let left = if psi_eval(f, lo) <= v + slack { lo } else { bisect(|r| psi_eval(f, r) <= v + slack, lo, x, tol) };
    Ok(PsiMin { r_star: left, mu_star: v })
}

/// Smallest point of [bad, good] satisfying `ok` when `ok(good)` holds,
/// `ok` being monotone on the interval. Works in either orientation.
fn bisect<F: Fn(f64) -> bool>(ok: F, mut bad: f64, mut good: f64, tol: f64) -> f64 {
    while (good - bad).abs() > tol {
        let mid = 0.5 * (bad + good);
        if ok(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SublevelInterval {
    pub r_minus: f64,
    pub r_plus: f64,
    pub tau: f64,
    pub empty: bool,
    /// r_plus was cut off by r_max.
    pub at_boundary: bool,
}

/// r₊ = sup{r : ψ⁻_δ(r) ≤ μ} and r₋ = inf{r : ψ⁻_τ(r) ≤ μ}.
pub fn psi_sublevel(f_minus: &SummaryFunctional, mu: f64, tau: f64, r_max: f64) -> Result<SublevelInterval> {
    if f_minus.sign != Sign::Minus {
        return Err(Error::arg("f_minus", "expects the lower summary functional"));
    }
    let lo = check_r_max(f_minus, r_max)?;
    let f_tau = f_minus.with_delta(tau)?;
    let tol = 1e-6;
    let empty = SublevelInterval { r_minus: f64::NAN, r_plus: f64::NAN, tau, empty: true, at_boundary: false };

    let m = psi_minimize(f_minus, r_max)?;
    if m.mu_star > mu {
        return Ok(empty);
    }
    let ok = |r: f64| psi_eval(f_minus, r) <= mu;
    let (r_plus, at_boundary) =
        if ok(r_max) { (r_max, true) } else { (bisect(|r| !ok(r), m.r_star, r_max, tol), false) };

    let mt = psi_minimize(&f_tau, r_max)?;
    if mt.mu_star > mu {
        return Ok(empty);
    }
    let ok_tau = |r: f64| psi_eval(&f_tau, r) <= mu;
    let r_minus = if ok_tau(lo) { lo } else { bisect(ok_tau, lo, mt.r_star, tol) };
    Ok(SublevelInterval { r_minus, r_plus, tau, empty: false, at_boundary })
}

/// τ = δ/⌈(μ − μ*)/r*⌉, or δ itself when that is undefined.
pub fn localization_tau(delta: f64, mu: f64, min: PsiMin) -> (f64, bool) {
    if min.r_star > 0.0 && mu > min.mu_star {
        let k = ((mu - min.mu_star) / min.r_star).ceil().max(1.0);
        (delta / k, false)
    } else {
        (delta, true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Localization {
    pub min: PsiMin,
    pub interval: SublevelInterval,
    pub tau_fallback: bool,
}

/// Minimizes ψ⁺, picks τ from its minimizer and returns the sublevel interval of ψ⁻.
pub fn psi_localize(
    f_plus: &SummaryFunctional,
    f_minus: &SummaryFunctional,
    mu: f64,
    r_max: f64,
) -> Result<Localization> {
    if f_plus.sign != Sign::Plus {
        return Err(Error::arg("f_plus", "expects the upper summary functional"));
    }
    let min = psi_minimize(f_plus, r_max)?;
    let (tau, tau_fallback) = localization_tau(f_minus.delta, mu, min);
    let interval = psi_sublevel(f_minus, mu, tau, r_max)?;
    Ok(Localization { min, interval, tau_fallback })
}
