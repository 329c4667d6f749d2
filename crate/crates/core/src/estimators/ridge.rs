use ndarray::{Array1, Array2};

use super::{least_squares_minnorm, Diagnostics, EstimatorId, Predictor};
use crate::error::{Error, Result};
use crate::linalg::{gram_cols, gram_rows, sym_eigh};
use crate::model::Dataset;

/// One eigendecomposition of the smaller Gram matrix, reused for every λ.
///
/// With X = U S Vᵀ, μ = s², and ỹ = UᵀY, the ridge solution is
/// w(λ) = V diag(s/(μ + nλ)) ỹ, its squared norm is Σ μỹ²/(μ + nλ)², and the
/// training residual is Σ (nλỹ/(μ + nλ))² + ‖Y_⊥‖².
pub struct SpectralRidge<'a> {
    data: &'a Dataset,
    primal: bool,
    mu: Array1<f64>,
    basis: Array2<f64>,
    y_proj: Array1<f64>,
    y_perp_sq: f64,
    cut: f64,
}

impl<'a> SpectralRidge<'a> {
    pub fn new(data: &'a Dataset) -> Result<Self> {
        let (n, d) = data.x.dim();
        let primal = d <= n;
        let g = if primal { gram_cols(data.x.view()) } else { gram_rows(data.x.view()) };
        let (mut mu, basis) = sym_eigh(&g)?;
        let top = mu.iter().cloned().fold(0.0, f64::max);
        let cut = n.max(d) as f64 * f64::EPSILON * top;
        mu.mapv_inplace(|m| m.max(0.0));
        let y_proj = if primal {
            let b = basis.t().dot(&data.x.t().dot(&data.y));
            Array1::from_iter(b.iter().zip(mu.iter()).map(|(&bi, &m)| if m > cut { bi / m.sqrt() } else { 0.0 }))
        } else {
            basis.t().dot(&data.y)
        };
        let kept: f64 = y_proj.iter().zip(mu.iter()).filter(|(_, &m)| m > cut).map(|(v, _)| v * v).sum();
        let y_perp_sq = (data.y.dot(&data.y) - kept).max(0.0);
        Ok(SpectralRidge { data, primal, mu, basis, y_proj, y_perp_sq, cut })
    }

    fn nlam(&self, lambda: f64) -> f64 {
        self.data.n() as f64 * lambda
    }

    /// ‖w(λ)‖₂; λ = 0 gives the min-norm least-squares norm.
    pub fn norm(&self, lambda: f64) -> f64 {
        let t = self.nlam(lambda);
        self.mu
            .iter()
            .zip(self.y_proj.iter())
            .filter(|(&m, _)| m > self.cut)
            .map(|(&m, &y)| m * y * y / ((m + t) * (m + t)))
            .sum::<f64>()
            .sqrt()
    }

    /// L̂(w(λ)).
    pub fn train_loss(&self, lambda: f64) -> f64 {
        let t = self.nlam(lambda);
        let inside: f64 = self
            .mu
            .iter()
            .zip(self.y_proj.iter())
            .map(|(&m, &y)| if m > self.cut { (t * y / (m + t)).powi(2) } else { y * y })
            .sum();
        (inside + self.y_perp_sq) / self.data.n() as f64
    }

    pub fn solve(&self, lambda: f64) -> Array1<f64> {
        let t = self.nlam(lambda);
        if self.primal {
            let coef = Array1::from_iter(self.mu.iter().zip(self.y_proj.iter()).map(|(&m, &y)| {
                if m > self.cut {
                    m.sqrt() * y / (m + t)
                } else {
                    0.0
                }
            }));
            self.basis.dot(&coef)
        } else {
            let coef = Array1::from_iter(self.mu.iter().zip(self.y_proj.iter()).map(|(&m, &y)| {
                if m > self.cut {
                    y / (m + t)
                } else {
                    0.0
                }
            }));
            self.data.x.t().dot(&self.basis.dot(&coef))
        }
    }

    pub fn mu_max(&self) -> f64 {
        self.mu.iter().cloned().fold(0.0, f64::max)
    }

    fn predictor(&self, w: Array1<f64>, id: EstimatorId, hyper: f64, lambda: f64, iters: usize) -> Predictor {
        let r = &self.data.y - &self.data.x.dot(&w);
        let grad = self.data.x.t().dot(&r).mapv(|v| -2.0 * v / self.data.n() as f64) + &w * (2.0 * lambda);
        Predictor {
            w,
            estimator: id,
            hyperparam: Some(hyper),
            diagnostics: Diagnostics {
                objective: r.dot(&r) / self.data.n() as f64,
                iterations: iters,
                kkt_residual: grad.iter().fold(0.0, |m, v| m.max(v.abs())),
                converged: true,
                method: "spectral",
            },
        }
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::arg("lambda", format!("must be finite and positive, got {lambda}")));
    }
    Ok(())
}

/// Ridge solutions w(λ) = (XᵀX + nλI)⁻¹XᵀY for every λ.
pub fn ridge_path(data: &Dataset, lambdas: &[f64]) -> Result<Vec<Predictor>> {
    for &l in lambdas {
        check_lambda(l)?;
    }
    let sr = SpectralRidge::new(data)?;
    Ok(lambdas.iter().map(|&l| sr.predictor(sr.solve(l), EstimatorId::Ridge, l, l, 1)).collect())
}

/// argmin over ‖w‖₂ ≤ R of L̂(w), minimum-norm among minimizers.
pub fn l2_constrained_erm(data: &Dataset, radius: f64) -> Result<Predictor> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::arg("radius", format!("must be finite and nonnegative, got {radius}")));
    }
    let mut ls = least_squares_minnorm(data)?;
    if ls.norm2() <= radius {
        ls.estimator = EstimatorId::L2Constrained;
        ls.hyperparam = Some(radius);
        return Ok(ls);
    }
    let sr = SpectralRidge::new(data)?;
    let n = data.n() as f64;
    if radius == 0.0 {
        let w = Array1::zeros(data.d());
        return Ok(sr.predictor(w, EstimatorId::L2Constrained, 0.0, 0.0, 0));
    }
    let scale = sr.mu_max().max(f64::MIN_POSITIVE);
    // bracket in t = log(nλ)
    let mut lo = (scale * 1e-18).ln();
    let mut hi = scale.ln();
    while sr.norm(hi.exp() / n) > radius {
        hi += 2.0;
    }
    let mut iters = 0;
    if sr.norm(lo.exp() / n) <= radius {
        hi = lo;
    } else {
        while iters < 300 {
            iters += 1;
            let mid = 0.5 * (lo + hi);
            let nm = sr.norm(mid.exp() / n);
            if (nm - radius).abs() <= 1e-10 * radius {
                hi = mid;
                break;
            }
            if nm > radius {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-14 {
                break;
            }
        }
    }
    let lambda = hi.exp() / n;
    let w = sr.solve(lambda);
    let mut p = sr.predictor(w, EstimatorId::L2Constrained, radius, lambda, iters);
    p.diagnostics.method = "ridge-bisection";
    Ok(p)
}
