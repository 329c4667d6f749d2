use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

use super::{mc_collect, ConstraintSet, SetKind, WidthEstimate};
use crate::error::{Error, Result};
use crate::linalg::{norm2, norm_inf};
use crate::model::CovarianceSpec;
use crate::rng::normal_vec;

/// E‖H‖₂ for H ∼ N(0, I_k).
pub fn chi_mean(k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let k = k as f64;
    std::f64::consts::SQRT_2 * (ln_gamma((k + 1.0) / 2.0) - ln_gamma(k / 2.0)).exp()
}

/// √(Tr Σ) − ‖Σ‖^{1/2} ≤ E‖x‖₂ ≤ √(Tr Σ).
pub fn l2_width_bracket(cov: &CovarianceSpec) -> (f64, f64) {
    let hi = cov.trace().sqrt();
    ((hi - cov.op_norm().sqrt()).max(0.0), hi)
}

fn sample_x<R: Rng + ?Sized>(
    cov: &CovarianceSpec,
    sd: Option<&ndarray::Array1<f64>>,
    rng: &mut R,
) -> ndarray::Array1<f64> {
    match sd {
        Some(sd) => ndarray::Array1::from_iter(sd.iter().map(|s| s * rng.sample::<f64, _>(StandardNormal))),
        None => {
            let g = normal_vec(rng, cov.dim());
            cov.sqrt_apply(g.view()).expect("dims")
        }
    }
}

/// W_Σ(K) = B·E‖x‖_* with x ∼ N(0, Σ), by Monte Carlo.
pub fn width_ball(cov: &CovarianceSpec, set: ConstraintSet, mc_samples: usize, seed: u64) -> Result<WidthEstimate> {
    if set.kind == SetKind::FullSpace {
        return Err(Error::Unbounded);
    }
    if mc_samples == 0 {
        return Err(Error::arg("mc_samples", "must be at least 1"));
    }
    let sd = cov.as_diagonal().map(|d| d.mapv(f64::sqrt));
    let dual = |rng: &mut crate::rng::TrialRng| {
        let x = sample_x(cov, sd.as_ref(), rng);
        match set.kind {
            SetKind::L2Ball => norm2(x.view()),
            _ => norm_inf(x.view()),
        }
    };
    let values = mc_collect(mc_samples, seed, dual);
    Ok(WidthEstimate::from_samples(&values).scaled(set.radius))
}

/// sup over K of ‖u‖_Σ.
pub fn radius_under_cov(cov: &CovarianceSpec, set: ConstraintSet) -> Result<f64> {
    match set.kind {
        SetKind::FullSpace => Err(Error::Unbounded),
        SetKind::L2Ball => Ok(set.radius * cov.op_norm().sqrt()),
        SetKind::L1Ball => Ok(set.radius * cov.max_diag().sqrt()),
    }
}
