//! Thin wrappers over BLAS/LAPACK used by the estimators.

use cblas_sys::{cblas_dsyrk, CBLAS_LAYOUT, CBLAS_TRANSPOSE, CBLAS_UPLO};
use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};
use ndarray_linalg::{Eigh, FactorizeC, JobSvd, SolveC, SVDDC, UPLO};

use crate::error::{Error, Result};

/// Above this diagonal-ratio estimate of the condition number the Cholesky
/// path is abandoned for the SVD.
const CHOL_COND_LIMIT: f64 = 1e8;

fn standard(x: ArrayView2<f64>) -> Array2<f64> {
    if x.is_standard_layout() {
        x.to_owned()
    } else {
        x.as_standard_layout().to_owned()
    }
}

fn syrk(x: ArrayView2<f64>, trans: bool) -> Array2<f64> {
    let x = standard(x);
    let (n, d) = x.dim();
    let (dim, k) = if trans { (d, n) } else { (n, d) };
    let mut c = Array2::<f64>::zeros((dim, dim));
    if dim == 0 {
        return c;
    }
    if k > 0 {
        let t = if trans { CBLAS_TRANSPOSE::CblasTrans } else { CBLAS_TRANSPOSE::CblasNoTrans };
        unsafe {
            cblas_dsyrk(
                CBLAS_LAYOUT::CblasRowMajor,
                CBLAS_UPLO::CblasUpper,
                t,
                dim as i32,
                k as i32,
                1.0,
                x.as_ptr(),
                d.max(1) as i32,
                0.0,
                c.as_mut_ptr(),
                dim as i32,
            );
        }
    }
    for i in 0..dim {
        for j in 0..i {
            c[[i, j]] = c[[j, i]];
        }
    }
    c
}

/// XᵀX.
pub fn gram_cols(x: ArrayView2<f64>) -> Array2<f64> {
    syrk(x, true)
}

/// XXᵀ.
pub fn gram_rows(x: ArrayView2<f64>) -> Array2<f64> {
    syrk(x, false)
}

/// Solve G c = b for symmetric positive definite G, with one refinement step.
/// Returns None when G is not numerically positive definite.
pub fn spd_solve(g: &Array2<f64>, b: &Array1<f64>) -> Option<Array1<f64>> {
    let f = g.factorizec(UPLO::Lower).ok()?;
    let diag = f.factor.diag();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &v in diag.iter() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(lo > 0.0) || (hi / lo).powi(2) > CHOL_COND_LIMIT {
        return None;
    }
    let mut c = f.solvec(b).ok()?;
    let r = b - &g.dot(&c);
    let dc = f.solvec(&r).ok()?;
    c += &dc;
    if c.iter().all(|v| v.is_finite()) {
        Some(c)
    } else {
        None
    }
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
pub fn sym_eigh(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    if a.nrows() == 0 {
        return Ok((Array1::zeros(0), Array2::zeros((0, 0))));
    }
    a.eigh(UPLO::Lower).map_err(|e| Error::Linalg(e.to_string()))
}

/// Thin SVD: (U, s, Vᵀ).
pub fn thin_svd(x: ArrayView2<f64>) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
    let (n, d) = x.dim();
    let k = n.min(d);
    if k == 0 {
        return Ok((Array2::zeros((n, 0)), Array1::zeros(0), Array2::zeros((0, d))));
    }
    let x = standard(x);
    let (u, s, vt) = x.svddc(JobSvd::Some).map_err(|e| Error::Linalg(e.to_string()))?;
    let u = u.ok_or_else(|| Error::Linalg("svd returned no U".into()))?;
    let vt = vt.ok_or_else(|| Error::Linalg("svd returned no Vt".into()))?;
    Ok((u.slice(s![.., ..k]).to_owned(), s, vt.slice(s![..k, ..]).to_owned()))
}

/// Pseudoinverse solution X⁺y with cutoff max(n, d)·eps·s_max.
pub fn pinv_solve(x: ArrayView2<f64>, y: ArrayView1<f64>) -> Result<Array1<f64>> {
    let (n, d) = x.dim();
    let (u, s, vt) = thin_svd(x)?;
    let smax = s.iter().cloned().fold(0.0, f64::max);
    let cut = (n.max(d) as f64) * f64::EPSILON * smax;
    let mut coef = u.t().dot(&y);
    for (c, &sv) in coef.iter_mut().zip(s.iter()) {
        *c = if sv > cut { *c / sv } else { 0.0 };
    }
    Ok(vt.t().dot(&coef))
}

/// Largest eigenvalue of a symmetric PSD operator by power iteration.
pub fn power_iteration<F>(dim: usize, mut apply: F, iters: usize, tol: f64) -> f64
where
    F: FnMut(&Array1<f64>) -> Array1<f64>,
{
    if dim == 0 {
        return 0.0;
    }
    // deterministic, not orthogonal to any coordinate vector
    let mut v = Array1::from_iter((0..dim).map(|i| 1.0 + 0.01 * ((i * 7919 % 101) as f64)));
    let nv = v.dot(&v).sqrt();
    v /= nv;
    let mut lam = 0.0;
    for _ in 0..iters {
        let w = apply(&v);
        let nw = w.dot(&w).sqrt();
        if nw == 0.0 {
            return 0.0;
        }
        let next = v.dot(&w);
        v = w / nw;
        if (next - lam).abs() <= tol * next.abs() {
            return next.max(nw);
        }
        lam = next;
    }
    lam
}

/// Largest eigenvalue of a symmetric matrix via LAPACK.
pub fn sym_max_eig(a: &Array2<f64>) -> Result<f64> {
    let (vals, _) = sym_eigh(a)?;
    Ok(vals.iter().cloned().fold(0.0, f64::max))
}

pub fn norm2(v: ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}

pub fn norm1(v: ArrayView1<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(v: ArrayView1<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Symmetric square root with eigenvalues clamped at 0.
pub fn sym_sqrt(vals: &Array1<f64>, vecs: &Array2<f64>) -> Array2<f64> {
    let mut scaled = vecs.clone();
    for (mut col, &l) in scaled.axis_iter_mut(Axis(1)).zip(vals.iter()) {
        col *= l.max(0.0).sqrt();
    }
    scaled.dot(&vecs.t())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn gram_matches_dot() {
        let x = array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]];
        assert_eq!(gram_cols(x.view()), x.t().dot(&x));
        assert_eq!(gram_rows(x.view()), x.dot(&x.t()));
    }

    #[test]
    fn pinv_of_rank_deficient() {
        let x = array![[1.0, 1.0], [1.0, 1.0]];
        let y = array![2.0, 2.0];
        let w = pinv_solve(x.view(), y.view()).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spd_solve_rejects_singular() {
        let g = array![[1.0, 1.0], [1.0, 1.0]];
        assert!(spd_solve(&g, &array![1.0, 1.0]).is_none());
        let g = array![[2.0, 0.5], [0.5, 1.0]];
        let c = spd_solve(&g, &array![1.0, 1.0]).unwrap();
        let r = g.dot(&c) - array![1.0, 1.0];
        assert!(r.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn power_iteration_finds_top() {
        let a = array![[3.0, 1.0], [1.0, 2.0]];
        let top = power_iteration(2, |v| a.dot(v), 1000, 1e-14);
        let exact = (5.0 + 5f64.sqrt()) / 2.0;
        assert!((top - exact).abs() < 1e-9);
    }
}
