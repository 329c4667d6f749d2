use ndarray::{Array1, ArrayView1, Zip};

use super::{Diagnostics, EstimatorId, Predictor};
use crate::error::{Error, Result};
use crate::linalg::{gram_cols, norm1, norm2, power_iteration};
use crate::model::Dataset;

/// Euclidean projection onto {x ≥ 0, Σx = s}.
pub fn project_simplex(v: ArrayView1<f64>, s: f64) -> Array1<f64> {
    if s <= 0.0 || v.is_empty() {
        return Array1::zeros(v.len());
    }
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - s) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.mapv(|x| (x - theta).max(0.0))
}

/// Euclidean projection onto the ℓ1 ball of radius `b`.
pub fn project_l1_ball(v: ArrayView1<f64>, b: f64) -> Array1<f64> {
    if b <= 0.0 {
        return Array1::zeros(v.len());
    }
    if norm1(v) <= b {
        return v.to_owned();
    }
    let abs = v.mapv(f64::abs);
    let mut p = project_simplex(abs.view(), b);
    Zip::from(&mut p).and(&v).for_each(|p, &x| {
        if x < 0.0 {
            *p = -*p;
        }
    });
    p
}

#[derive(Clone, Copy, Debug)]
pub struct LassoOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LassoOptions {
    fn default() -> Self {
        LassoOptions { tol: 1e-8, max_iter: 50_000 }
    }
}

pub fn l1_constrained_erm(data: &Dataset, b: f64) -> Result<Predictor> {
    l1_constrained_erm_with(data, b, LassoOptions::default())
}

/// Projected gradient on ½L̂ over {‖w‖₁ ≤ B} with step 1/‖XᵀX/n‖.
pub fn l1_constrained_erm_with(data: &Dataset, b: f64, opts: LassoOptions) -> Result<Predictor> {
    if !(b.is_finite() && b >= 0.0) {
        return Err(Error::arg("B", format!("must be finite and nonnegative, got {b}")));
    }
    let (n, d) = data.x.dim();
    let nf = n as f64;
    let gram = if d <= 2 * n { Some(gram_cols(data.x.view()) / nf) } else { None };
    let xty = data.x.t().dot(&data.y) / nf;
    let grad = |w: &Array1<f64>| -> Array1<f64> {
        match &gram {
            Some(g) => g.dot(w) - &xty,
            None => data.x.t().dot(&(data.x.dot(w) - &data.y)) / nf,
        }
    };
    let lip = match &gram {
        Some(g) => power_iteration(d, |v| g.dot(v), 5000, 1e-13),
        None => power_iteration(d, |v| data.x.t().dot(&data.x.dot(v)) / nf, 5000, 1e-13),
    } * (1.0 + 1e-9);

    let mut w = Array1::zeros(d);
    let mut iterations = 0;
    let mut kkt = 0.0;
    let mut converged = true;
    if b > 0.0 && lip > 0.0 {
        converged = false;
        while iterations < opts.max_iter {
            iterations += 1;
            let g = grad(&w);
            let step = &w - &(g / lip);
            let next = project_l1_ball(step.view(), b);
            kkt = lip * norm2((&w - &next).view());
            w = next;
            if kkt <= opts.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            log::warn!("l1_constrained_erm: stopped after {iterations} iterations, kkt residual {kkt:e}");
        }
    }
    let objective = data.empirical_loss(w.view())?;
    Ok(Predictor {
        w,
        estimator: EstimatorId::L1Constrained,
        hyperparam: Some(b),
        diagnostics: Diagnostics { objective, iterations, kkt_residual: kkt, converged, method: "projected-gradient" },
    })
}
