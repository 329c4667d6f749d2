use rand::Rng;
use rand_distr::{ChiSquared, StandardNormal};

use super::{chi_mean, mc_collect, mean_se, WidthEstimate, WidthMethod};
use crate::error::{Error, Result};
use crate::model::CovarianceSpec;

/// r ↦ W_Σ(K_r) with all randomness frozen at construction.
pub trait LocalizedWidth: Send + Sync {
    fn width(&self, r: f64) -> WidthEstimate;
    /// Smallest r with K_r nonempty.
    fn min_radius(&self) -> f64 {
        0.0
    }
    /// Radius beyond which K_r = K, if K is bounded.
    fn max_radius(&self) -> Option<f64> {
        None
    }
}

/// K = R^d: W_Σ(K_r) = r·E‖PH‖₂ with P the projector onto span(Σ).
#[derive(Clone, Debug)]
pub struct FullSpaceWidth {
    unit: WidthEstimate,
}

impl FullSpaceWidth {
    /// ‖PH‖₂ is χ with rank(Σ) degrees of freedom, so it is sampled as such.
    pub fn monte_carlo(cov: &CovarianceSpec, mc_samples: usize, seed: u64) -> Result<Self> {
        if mc_samples == 0 {
            return Err(Error::arg("mc_samples", "must be at least 1"));
        }
        let rank = cov.rank();
        if rank == 0 {
            return Ok(FullSpaceWidth { unit: WidthEstimate::closed_form(0.0) });
        }
        let chi2 = ChiSquared::new(rank as f64).expect("positive dof");
        let values = mc_collect(mc_samples, seed, |rng| rng.sample(chi2).sqrt());
        Ok(FullSpaceWidth { unit: WidthEstimate::from_samples(&values) })
    }

    pub fn closed_form(cov: &CovarianceSpec) -> Self {
        FullSpaceWidth { unit: WidthEstimate::closed_form(chi_mean(cov.rank())) }
    }

    pub fn from_unit(unit: WidthEstimate) -> Self {
        FullSpaceWidth { unit }
    }

    /// Width per unit radius.
    pub fn unit(&self) -> WidthEstimate {
        self.unit
    }
}

impl LocalizedWidth for FullSpaceWidth {
    fn width(&self, r: f64) -> WidthEstimate {
        self.unit.scaled(r)
    }
}

pub fn localized_width_full_space(cov: &CovarianceSpec, r: f64, mc_samples: usize, seed: u64) -> Result<WidthEstimate> {
    if !(r >= 0.0) {
        return Err(Error::arg("r", format!("must be nonnegative, got {r}")));
    }
    Ok(FullSpaceWidth::monte_carlo(cov, mc_samples, seed)?.width(r))
}

/// K = {w*}.
#[derive(Clone, Copy, Debug, Default)]
pub struct SingletonWidth;

impl LocalizedWidth for SingletonWidth {
    fn width(&self, _r: f64) -> WidthEstimate {
        WidthEstimate::closed_form(0.0)
    }
    fn max_radius(&self) -> Option<f64> {
        Some(0.0)
    }
}

/// K = B·(unit ℓ2 ball), Σ = I_d, localized around w* with ‖w*‖ = a.
///
/// Writing H = h₁e + H_⊥ with e = w*/a and u = w − w* = t e + u_⊥, the
/// supremum of ⟨H, u⟩ over K_r becomes max h₁t + ‖H_⊥‖s over the
/// intersection of the disks |(t + a, s)| ≤ B and |(t, s)| ≤ r. A linear
/// function over two intersecting disks peaks at one disk's own maximizer or
/// at a corner of the lens.
#[derive(Clone, Debug)]
pub struct IsotropicBallWidth {
    b: f64,
    a: f64,
    samples: Vec<(f64, f64)>,
}

impl IsotropicBallWidth {
    pub fn new(b: f64, wstar_norm: f64, d: usize, mc_samples: usize, seed: u64) -> Result<Self> {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::arg("B", format!("must be finite and nonnegative, got {b}")));
        }
        if !(wstar_norm >= 0.0 && wstar_norm.is_finite()) {
            return Err(Error::arg("wstar_norm", format!("must be finite and nonnegative, got {wstar_norm}")));
        }
        if d == 0 || mc_samples == 0 {
            return Err(Error::arg("d", "dimension and sample count must be positive"));
        }
        let chi2 = if d > 1 { Some(ChiSquared::new((d - 1) as f64).expect("positive dof")) } else { None };
        let samples = mc_collect(mc_samples, seed, |rng| {
            let h1: f64 = rng.sample(StandardNormal);
            let g = chi2.map(|c| rng.sample(c).sqrt()).unwrap_or(0.0);
            (h1, g)
        });
        Ok(IsotropicBallWidth { b, a: wstar_norm, samples })
    }

    /// Per-sample supremum; None when K_r is empty.
    pub fn sample_sup(&self, h1: f64, g: f64, r: f64) -> Option<f64> {
        two_disk_sup(self.a, self.b, r, h1, g)
    }
}

pub(crate) fn two_disk_sup(a: f64, b: f64, r: f64, h1: f64, g: f64) -> Option<f64> {
    if a == 0.0 {
        return Some(b.min(r) * (h1 * h1 + g * g).sqrt());
    }
    if a > b + r {
        return None;
    }
    let c = (h1 * h1 + g * g).sqrt();
    let tol = 1e-12 * (a + b + r);
    let in_big = |t: f64, s: f64| ((t + a).powi(2) + s * s).sqrt() <= b + tol;
    let in_small = |t: f64, s: f64| (t * t + s * s).sqrt() <= r + tol;
    let mut best = f64::NEG_INFINITY;
    if c == 0.0 {
        return Some(0.0);
    }
    let (t, s) = (r * h1 / c, r * g / c);
    if in_big(t, s) {
        best = best.max(h1 * t + g * s);
    }
    let (t, s) = (-a + b * h1 / c, b * g / c);
    if in_small(t, s) {
        best = best.max(h1 * t + g * s);
    }
    let x = (b * b - r * r - a * a) / (2.0 * a);
    let y2 = r * r - x * x;
    if y2 >= 0.0 {
        let y = y2.sqrt();
        best = best.max(h1 * x + g * y).max(h1 * x - g * y);
    }
    if best == f64::NEG_INFINITY {
        // one disk inside the other with no interior maximizer found within
        // rounding; fall back to the smaller disk's maximizer
        best = if b < r { h1 * (-a + b * h1 / c) + g * (b * g / c) } else { r * c };
    }
    Some(best)
}

impl LocalizedWidth for IsotropicBallWidth {
    fn width(&self, r: f64) -> WidthEstimate {
        if self.a > self.b + r {
            return WidthEstimate::empty();
        }
        let values: Vec<f64> =
            self.samples.iter().map(|&(h1, g)| self.sample_sup(h1, g, r).expect("nonempty")).collect();
        let (mean, se) = mean_se(&values);
        WidthEstimate { value: mean, std_error: se, method: WidthMethod::MonteCarlo, mc_samples: values.len() }
    }

    fn min_radius(&self) -> f64 {
        (self.a - self.b).max(0.0)
    }

    fn max_radius(&self) -> Option<f64> {
        Some(self.a + self.b)
    }
}

pub fn localized_width_l2_isotropic(
    b: f64,
    r: f64,
    wstar_norm: f64,
    d: usize,
    mc_samples: usize,
    seed: u64,
) -> Result<WidthEstimate> {
    if !(r >= 0.0) {
        return Err(Error::arg("r", format!("must be nonnegative, got {r}")));
    }
    Ok(IsotropicBallWidth::new(b, wstar_norm, d, mc_samples, seed)?.width(r))
}
