//! Generalization-bound calculators.

mod apps;
mod general;
mod ols;
mod summary;

pub use apps::{
    isotropic_interp_interval, isotropic_interp_interval_explicit, isotropic_minnorm_norm_bound, lasso_compat_bound,
    lasso_isotropic_asymptote, lasso_isotropic_interval, lasso_lowcomplexity_p, low_complexity_bound, ols_interval,
    ols_interval_eps, ols_interval_explicit, ols_lowcomplexity_p,
};
pub use general::{
    c_functional, cov_split_bound, flatness_bound, optimally_tuned_bound, optimally_tuned_ridge_bound,
    optimistic_bound, SplitContext,
};
pub use ols::{ols_exact_moments, ols_highprob_deviation, HighProbDeviation, HIGHPROB_K};
pub use summary::{
    default_r_max, localization_tau, psi_eval, psi_localize, psi_minimize, psi_sublevel, Localization, PsiMin, Sign,
    SublevelInterval, SummaryFunctional,
};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Combine {
    /// multiplier · Σ terms
    Sum,
    /// multiplier · (Σ terms)²
    ScaledSquare,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Term {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: &'static str,
    pub value: f64,
    pub multiplier: f64,
    pub combine: Combine,
    pub terms: Vec<Term>,
    pub delta: f64,
    pub applicable: bool,
    /// Lower endpoint for two-sided results.
    pub lower: Option<f64>,
    /// Non-fatal conditions encountered while evaluating.
    pub flags: Vec<&'static str>,
}

impl BoundReport {
    pub(crate) fn build(
        name: &'static str,
        multiplier: f64,
        combine: Combine,
        terms: Vec<Term>,
        delta: f64,
        applicable: bool,
    ) -> Self {
        let mut r = BoundReport {
            name,
            value: 0.0,
            multiplier,
            combine,
            terms,
            delta,
            applicable,
            lower: None,
            flags: Vec::new(),
        };
        r.value = r.recombine();
        r
    }

    pub fn recombine(&self) -> f64 {
        let s: f64 = self.terms.iter().map(|t| t.value).sum();
        match self.combine {
            Combine::Sum => self.multiplier * s,
            Combine::ScaledSquare => self.multiplier * s * s,
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// Two-sided intervals store (center, half_width); returns both endpoints.
    pub fn interval(&self) -> Option<(f64, f64)> {
        self.lower.map(|lo| (lo, self.value))
    }
}

pub(crate) fn term(name: &'static str, value: f64) -> Term {
    Term { name, value }
}

pub(crate) fn nonneg(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::arg(name, format!("must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

pub(crate) fn two_sided(name: &'static str, center: f64, half: f64, delta: f64, applicable: bool) -> BoundReport {
    let mut r = BoundReport::build(
        name,
        1.0,
        Combine::Sum,
        vec![term("center", center), term("half_width", half)],
        delta,
        applicable,
    );
    r.lower = Some(center - half);
    r
}
