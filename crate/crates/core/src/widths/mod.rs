//! Gaussian-width oracles.

mod ball;
mod compat;
mod cone;
mod localized;

pub use ball::{chi_mean, l2_width_bracket, radius_under_cov, width_ball};
pub use compat::{compatibility_constant, compatibility_lower_bound};
pub(crate) use cone::golden_min;
pub use cone::{l1_descent_cone_dimension, psi_objective, statistical_dimension_psi, ConeDimension};
pub use localized::{
    localized_width_full_space, localized_width_l2_isotropic, FullSpaceWidth, IsotropicBallWidth, LocalizedWidth,
    SingletonWidth,
};

use rayon::prelude::*;
use serde::Serialize;

use crate::rng::{child_seed, rng_from_seed, TrialRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    FullSpace,
    L2Ball,
    L1Ball,
}

/// Origin-centered norm ball, or the whole space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstraintSet {
    pub kind: SetKind,
    pub radius: f64,
}

impl ConstraintSet {
    pub fn full_space() -> Self {
        ConstraintSet { kind: SetKind::FullSpace, radius: f64::INFINITY }
    }

    pub fn l2_ball(radius: f64) -> Self {
        ConstraintSet { kind: SetKind::L2Ball, radius }
    }

    pub fn l1_ball(radius: f64) -> Self {
        ConstraintSet { kind: SetKind::L1Ball, radius }
    }

    pub fn unit(self) -> Self {
        ConstraintSet { radius: 1.0, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthMethod {
    ClosedForm,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WidthEstimate {
    /// −∞ when the localized set is empty.
    pub value: f64,
    pub std_error: f64,
    pub method: WidthMethod,
    pub mc_samples: usize,
}

impl WidthEstimate {
    pub fn closed_form(value: f64) -> Self {
        WidthEstimate { value, std_error: 0.0, method: WidthMethod::ClosedForm, mc_samples: 0 }
    }

    pub fn empty() -> Self {
        WidthEstimate::closed_form(f64::NEG_INFINITY)
    }

    pub fn is_empty(&self) -> bool {
        self.value == f64::NEG_INFINITY
    }

    pub fn scaled(self, c: f64) -> Self {
        WidthEstimate { value: self.value * c, std_error: self.std_error * c.abs(), ..self }
    }

    pub(crate) fn from_samples(values: &[f64]) -> Self {
        let (mean, se) = mean_se(values);
        WidthEstimate { value: mean, std_error: se, method: WidthMethod::MonteCarlo, mc_samples: values.len() }
    }
}

const BLOCK: usize = 128;

/// Draws `samples` values, block `b` from its own child stream, so the
/// result does not depend on the thread count.
pub(crate) fn mc_collect<T, F>(samples: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut TrialRng) -> T + Sync,
{
    let blocks = samples.div_ceil(BLOCK);
    let chunks: Vec<Vec<T>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_from_seed(child_seed(seed, b as u64));
            let len = BLOCK.min(samples - b * BLOCK);
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

pub(crate) fn mean_se(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    if m == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
    (mean, (var / m as f64).sqrt())
}
