use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::estimators::{project_l1_ball, project_simplex};
use crate::linalg::sym_max_eig;
use crate::model::CovarianceSpec;

const MAX_SUPPORT: usize = 12;
const MAX_DIM: usize = 30;

/// λ_min(Σ), a lower bound on φ²(Σ, S) valid at any scale.
pub fn compatibility_lower_bound(cov: &CovarianceSpec) -> f64 {
    cov.min_eig()
}

/// min uᵀΣu over u_S = s⊙v with v in the unit simplex and ‖u_{S^c}‖₁ ≤ 1.
/// Accelerated projected gradient with restarts; stops on the Frank-Wolfe gap.
fn pattern_min(sigma: &Array2<f64>, support: &[usize], rest: &[usize], signs: &[f64], lip: f64) -> f64 {
    let k = support.len();
    let assemble = |v: &Array1<f64>, z: &Array1<f64>| {
        let mut u = Array1::zeros(sigma.nrows());
        for (j, &i) in support.iter().enumerate() {
            u[i] = signs[j] * v[j];
        }
        for (j, &i) in rest.iter().enumerate() {
            u[i] = z[j];
        }
        u
    };
    let split_grad = |u: &Array1<f64>| {
        let g = sigma.dot(u) * 2.0;
        let gv = Array1::from_iter(support.iter().enumerate().map(|(j, &i)| signs[j] * g[i]));
        let gz = Array1::from_iter(rest.iter().map(|&i| g[i]));
        (gv, gz)
    };
    let obj = |u: &Array1<f64>| u.dot(&sigma.dot(u));

    let mut v = Array1::from_elem(k, 1.0 / k as f64);
    let mut z = Array1::<f64>::zeros(rest.len());
    let mut yv = v.clone();
    let mut yz = z.clone();
    let mut t = 1.0f64;
    let mut f_prev = obj(&assemble(&v, &z));
    for _ in 0..200_000 {
        let (gv, gz) = split_grad(&assemble(&yv, &yz));
        let nv = project_simplex((&yv - &(gv / lip)).view(), 1.0);
        let nz = project_l1_ball((&yz - &(gz / lip)).view(), 1.0);
        let u = assemble(&nv, &nz);
        let f = obj(&u);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if f > f_prev {
            // restart momentum
            yv = v.clone();
            yz = z.clone();
            t = 1.0;
            continue;
        }
        let mom = (t - 1.0) / t_next;
        yv = &nv + &((&nv - &v) * mom);
        yz = &nz + &((&nz - &z) * mom);
        v = nv;
        z = nz;
        t = t_next;
        f_prev = f;
        let (gv, gz) = split_grad(&u);
        let gap_v = gv.dot(&v) - gv.iter().cloned().fold(f64::INFINITY, f64::min);
        let gap_z = gz.dot(&z) + gz.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if gap_v + gap_z <= 1e-12 * f.max(1e-300) + 1e-15 {
            break;
        }
    }
    f_prev
}

/// φ²(Σ, S) = min over the cone ‖u_{S^c}‖₁ ≤ ‖u_S‖₁ of |S|·uᵀΣu/‖u_S‖₁².
pub fn compatibility_constant(cov: &CovarianceSpec, support: &[usize]) -> Result<f64> {
    let d = cov.dim();
    let k = support.len();
    if k == 0 {
        return Err(Error::arg("S", "support must be nonempty"));
    }
    if k > MAX_SUPPORT {
        return Err(Error::arg("S", format!("support size {k} exceeds {MAX_SUPPORT}")));
    }
    if d > MAX_DIM {
        return Err(Error::arg("cov", format!("dimension {d} exceeds {MAX_DIM}; use compatibility_lower_bound")));
    }
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != k || sorted.iter().any(|&i| i >= d) {
        return Err(Error::arg("S", "indices must be distinct and below the dimension"));
    }
    let rest: Vec<usize> = (0..d).filter(|i| !sorted.contains(i)).collect();
    let sigma = cov.to_dense();
    let lip = 2.0 * sym_max_eig(&sigma)?;
    if lip == 0.0 {
        return Ok(0.0);
    }
    let mut best = f64::INFINITY;
    // u ↦ −u maps pattern s to −s, so fix the first sign
    for mask in 0..(1usize << (k - 1)) {
        let signs: Vec<f64> = (0..k).map(|j| if j > 0 && (mask >> (j - 1)) & 1 == 1 { -1.0 } else { 1.0 }).collect();
        best = best.min(pattern_min(&sigma, &sorted, &rest, &signs, lip));
    }
    Ok(k as f64 * best)
}
