#![allow(dead_code)]

use std::sync::Arc;

use ndarray::{Array1, Array2};
use optrate_core::model::sample_dataset;
use optrate_core::{CovarianceSpec, Dataset, RegressionProblem};

/// Dense Gaussian elimination with partial pivoting.
pub fn gauss_solve(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let n = b.len();
    let mut m = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[[i, col]].abs().total_cmp(&m[[j, col]].abs())).unwrap();
        if piv != col {
            for k in 0..n {
                m.swap([col, k], [piv, k]);
            }
            x.swap(col, piv);
        }
        for row in col + 1..n {
            let f = m[[row, col]] / m[[col, col]];
            for k in col..n {
                m[[row, k]] -= f * m[[col, k]];
            }
            x[row] -= f * x[col];
        }
    }
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[[row, k]] * x[k]).sum();
        x[row] = (x[row] - s) / m[[row, row]];
    }
    x
}

pub fn isotropic_data(n: usize, d: usize, sigma: f64, wstar: Array1<f64>, seed: u64) -> Dataset {
    assert_eq!(wstar.len(), d);
    let p = Arc::new(RegressionProblem::new(sigma, wstar, CovarianceSpec::identity(d)).unwrap());
    sample_dataset(&p, n, seed).unwrap()
}

pub fn e1(d: usize, scale: f64) -> Array1<f64> {
    let mut w = Array1::zeros(d);
    w[0] = scale;
    w
}

/// Euclidean projection onto the ℓ1 ball by enumerating every face.
pub fn brute_l1_projection(v: &[f64], b: f64) -> Vec<f64> {
    let d = v.len();
    if v.iter().map(|x| x.abs()).sum::<f64>() <= b {
        return v.to_vec();
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1usize..(1 << d) {
        let idx: Vec<usize> = (0..d).filter(|i| mask >> i & 1 == 1).collect();
        for signs in 0usize..(1 << idx.len()) {
            let s: Vec<f64> = (0..idx.len()).map(|j| if signs >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
            // project onto {x_A : Σ s_j x_j = b}, zero elsewhere
            let dot: f64 = idx.iter().zip(&s).map(|(&i, &sj)| sj * v[i]).sum();
            let shift = (dot - b) / idx.len() as f64;
            let mut x = vec![0.0; d];
            let mut ok = true;
            for (j, &i) in idx.iter().enumerate() {
                x[i] = v[i] - s[j] * shift;
                if x[i] * s[j] < -1e-15 {
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            let dist: f64 = x.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum();
            if best.as_ref().is_none_or(|(bd, _)| dist < *bd) {
                best = Some((dist, x));
            }
        }
    }
    best.unwrap().1
}

/// φ² by grid over the cone slice ‖u_S‖₁ = 1.
pub fn grid_compat(sigma: &Array2<f64>, support: &[usize]) -> f64 {
    let d = sigma.nrows();
    let rest: Vec<usize> = (0..d).filter(|i| !support.contains(i)).collect();
    let k = support.len();
    let m = 1200;
    let mut best = f64::INFINITY;
    let mut eval = |u: &Array1<f64>| {
        best = best.min(k as f64 * u.dot(&sigma.dot(u)));
    };
    let grid = |i: usize| -1.0 + 2.0 * i as f64 / m as f64;
    // S-part on the ℓ1 sphere, rest in the ℓ1 ball
    let s_parts: Vec<Vec<f64>> = match k {
        1 => vec![vec![1.0]],
        2 => (0..=m)
            .flat_map(|i| {
                let t = i as f64 / m as f64;
                [vec![t, 1.0 - t], vec![t, t - 1.0]]
            })
            .collect(),
        _ => unreachable!(),
    };
    let r_parts: Vec<Vec<f64>> = match rest.len() {
        0 => vec![vec![]],
        1 => (0..=m).map(|i| vec![grid(i)]).collect(),
        2 => (0..=m)
            .flat_map(|i| (0..=m).map(move |j| vec![grid(i), grid(j)]))
            .filter(|v| v[0].abs() + v[1].abs() <= 1.0 + 1e-12)
            .collect(),
        _ => unreachable!(),
    };
    for sp in &s_parts {
        for rp in &r_parts {
            let mut u = Array1::zeros(d);
            for (j, &i) in support.iter().enumerate() {
                u[i] = sp[j];
            }
            for (j, &i) in rest.iter().enumerate() {
                u[i] = rp[j];
            }
            eval(&u);
        }
    }
    best
}

/// Midpoint convexity on a 50-point grid of [lo, hi].
pub fn midpoint_convex(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> bool {
    let pts: Vec<f64> = (0..50).map(|i| lo + (hi - lo) * i as f64 / 49.0).collect();
    for i in 0..50 {
        for j in (i + 2..50).step_by(2) {
            let mid = f(0.5 * (pts[i] + pts[j]));
            if mid > 0.5 * (f(pts[i]) + f(pts[j])) + 1e-12 {
                return false;
            }
        }
    }
    true
}
