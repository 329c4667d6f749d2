use ndarray::Array1;

use super::{Diagnostics, EstimatorId, Predictor};
use crate::error::Result;
use crate::linalg::{gram_cols, gram_rows, norm_inf, pinv_solve, spd_solve};
use crate::model::Dataset;

/// Minimum-ℓ2-norm least-squares solution X⁺Y.
///
/// Full-rank designs go through Cholesky on the smaller Gram matrix; anything
/// else falls back to an SVD pseudoinverse.
pub fn least_squares_minnorm(data: &Dataset) -> Result<Predictor> {
    let (n, d) = data.x.dim();
    let x = data.x.view();
    let fast: Option<Array1<f64>> = if d == 0 {
        Some(Array1::zeros(0))
    } else if d <= n {
        let g = gram_cols(x);
        let b = x.t().dot(&data.y);
        spd_solve(&g, &b)
    } else {
        let g = gram_rows(x);
        spd_solve(&g, &data.y).map(|c| x.t().dot(&c))
    };
    let (w, method) = match fast {
        Some(w) => (w, "cholesky"),
        None => (pinv_solve(x, data.y.view())?, "svd"),
    };
    let r = data.residual(w.view())?;
    let kkt = norm_inf(x.t().dot(&r).view());
    Ok(Predictor {
        diagnostics: Diagnostics {
            objective: r.dot(&r) / n as f64,
            iterations: 1,
            kkt_residual: kkt,
            converged: true,
            method,
        },
        w,
        estimator: EstimatorId::MinNormLeastSquares,
        hyperparam: None,
    })
}
