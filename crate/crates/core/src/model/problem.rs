use std::sync::Arc;

use ndarray::{Array1, Array2, ArrayView1};

use super::covariance::CovarianceSpec;
use crate::error::{check_dim, Error, Result};
use crate::rng::{normal_matrix, normal_vec, rng_from_seed};

/// Ground truth of the Gaussian linear model Y = Xw* + ξ.
#[derive(Clone, Debug)]
pub struct RegressionProblem {
    pub sigma: f64,
    pub w_star: Array1<f64>,
    pub cov: CovarianceSpec,
}

impl RegressionProblem {
    pub fn new(sigma: f64, w_star: Array1<f64>, cov: CovarianceSpec) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::arg("sigma", format!("must be finite and nonnegative, got {sigma}")));
        }
        check_dim(cov.dim(), w_star.len())?;
        Ok(RegressionProblem { sigma, w_star, cov })
    }

    pub fn dim(&self) -> usize {
        self.w_star.len()
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// L(0).
    pub fn null_loss(&self) -> f64 {
        self.sigma2() + self.cov.quad_form(self.w_star.view()).expect("dims checked")
    }

    /// ‖w − w*‖²_Σ.
    pub fn excess_risk(&self, w: ArrayView1<f64>) -> Result<f64> {
        check_dim(self.dim(), w.len())?;
        let diff = &w - &self.w_star;
        self.cov.quad_form(diff.view())
    }

    /// L(w) = σ² + ‖w − w*‖²_Σ.
    pub fn population_loss(&self, w: ArrayView1<f64>) -> Result<f64> {
        Ok(self.sigma2() + self.excess_risk(w)?)
    }
}

/// One sample (X, Y) drawn from a problem.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub seed: u64,
    pub problem: Arc<RegressionProblem>,
}

impl Dataset {
    pub fn from_parts(x: Array2<f64>, y: Array1<f64>, problem: Arc<RegressionProblem>) -> Result<Self> {
        check_dim(x.nrows(), y.len())?;
        check_dim(problem.dim(), x.ncols())?;
        Ok(Dataset { x, y, seed: 0, problem })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    pub fn gamma(&self) -> f64 {
        self.d() as f64 / self.n() as f64
    }

    pub fn residual(&self, w: ArrayView1<f64>) -> Result<Array1<f64>> {
        check_dim(self.d(), w.len())?;
        Ok(&self.y - &self.x.dot(&w))
    }

    /// ξ = Y − Xw*.
    pub fn noise(&self) -> Array1<f64> {
        &self.y - &self.x.dot(&self.problem.w_star)
    }

    pub fn empirical_loss(&self, w: ArrayView1<f64>) -> Result<f64> {
        let r = self.residual(w)?;
        Ok(r.dot(&r) / self.n() as f64)
    }
}

pub fn sample_dataset(problem: &Arc<RegressionProblem>, n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::arg("n", "sample size must be at least 1"));
    }
    check_dim(problem.cov.dim(), problem.w_star.len())?;
    let d = problem.dim();
    let mut rng = rng_from_seed(seed);
    let mut x = normal_matrix(&mut rng, n, d);
    problem.cov.color_rows(&mut x)?;
    let mut y = x.dot(&problem.w_star);
    if problem.sigma > 0.0 {
        let xi = normal_vec(&mut rng, n);
        y.scaled_add(problem.sigma, &xi);
    }
    Ok(Dataset { x, y, seed, problem: Arc::clone(problem) })
}

pub fn empirical_loss(w: ArrayView1<f64>, data: &Dataset) -> Result<f64> {
    data.empirical_loss(w)
}

pub fn population_loss(w: ArrayView1<f64>, problem: &RegressionProblem) -> Result<f64> {
    problem.population_loss(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn iso(d: usize, sigma: f64) -> Arc<RegressionProblem> {
        Arc::new(RegressionProblem::new(sigma, Array1::ones(d), CovarianceSpec::identity(d)).unwrap())
    }

    #[test]
    fn noiseless_labels_are_exact() {
        let p = iso(7, 0.0);
        let data = sample_dataset(&p, 20, 1).unwrap();
        assert_eq!(data.noise().iter().fold(0.0f64, |m, v| m.max(v.abs())), 0.0);
    }

    #[test]
    fn zero_covariance_gives_pure_noise() {
        let cov = CovarianceSpec::diagonal(Array1::zeros(3)).unwrap();
        let p = Arc::new(RegressionProblem::new(1.0, array![1.0, 2.0, 3.0], cov).unwrap());
        let data = sample_dataset(&p, 10, 4).unwrap();
        assert!(data.x.iter().all(|&v| v == 0.0));
        assert_eq!(data.noise(), data.y);
        assert!(data.y.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn forced_arithmetic() {
        let cov = CovarianceSpec::identity(2);
        let p = Arc::new(RegressionProblem::new(0.0, array![0.0, 0.0], cov).unwrap());
        let data = Dataset::from_parts(array![[1.0, 0.0]], array![2.0], p).unwrap();
        assert_eq!(data.empirical_loss(array![0.0, 0.0].view()).unwrap(), 4.0);
    }

    #[test]
    fn dimension_errors() {
        let cov = CovarianceSpec::identity(3);
        assert!(RegressionProblem::new(1.0, Array1::zeros(2), cov).is_err());
        let p = iso(3, 1.0);
        assert!(p.population_loss(Array1::zeros(2).view()).is_err());
        assert!(sample_dataset(&p, 0, 0).is_err());
    }
}
