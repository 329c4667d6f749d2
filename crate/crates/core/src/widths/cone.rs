use ndarray::ArrayView1;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use statrs::function::erf::erfc;

use super::{mc_collect, WidthEstimate};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConeDimension {
    /// Statistical dimension δ of the ℓ1 descent cone at w*.
    pub stat_dim: WidthEstimate,
    /// √δ, used in place of the cone's Gaussian width ω (ω² ≤ δ ≤ ω² + 1).
    pub width: f64,
    pub support: usize,
    pub dim: usize,
}

/// min over λ ≥ 0 of Σ_S (g_i − λs_i)² + Σ_{S^c} (|g_i| − λ)₊².
///
/// The derivative is piecewise linear and increasing in λ, so the root is
/// found exactly by walking the sorted off-support magnitudes.
pub(crate) fn polar_distance_sq(on: &[f64], off_sorted_desc: &[f64]) -> f64 {
    let k = on.len() as f64;
    let a: f64 = on.iter().sum();
    let eval = |lam: f64| {
        let on_part: f64 = on.iter().map(|&v| (v - lam).powi(2)).sum();
        let off_part: f64 = off_sorted_desc.iter().take_while(|&&v| v > lam).map(|&v| (v - lam).powi(2)).sum();
        on_part + off_part
    };
    // derivative/2 at λ with the m largest off values active: (k+m)λ − a − S_m
    let mut s_m = 0.0;
    let mut lam = f64::NAN;
    for m in 0..=off_sorted_desc.len() {
        if m > 0 {
            s_m += off_sorted_desc[m - 1];
        }
        let cand = (a + s_m) / (k + m as f64);
        let upper = if m == 0 { f64::INFINITY } else { off_sorted_desc[m - 1] };
        let lower = off_sorted_desc.get(m).copied().unwrap_or(0.0);
        if cand >= lower && cand <= upper {
            lam = cand;
            break;
        }
    }
    if !(lam > 0.0) {
        lam = 0.0;
    }
    eval(lam)
}

/// Monte Carlo statistical dimension of the descent cone of ‖·‖₁ at w*.
pub fn l1_descent_cone_dimension(wstar: ArrayView1<f64>, mc_samples: usize, seed: u64) -> Result<ConeDimension> {
    let support: Vec<usize> = (0..wstar.len()).filter(|&i| wstar[i] != 0.0).collect();
    if support.is_empty() {
        return Err(Error::arg("wstar", "must have at least one nonzero entry"));
    }
    if mc_samples == 0 {
        return Err(Error::arg("mc_samples", "must be at least 1"));
    }
    let d = wstar.len();
    let signs: Vec<f64> = wstar.iter().map(|v| v.signum()).collect();
    let values = mc_collect(mc_samples, seed, |rng| {
        let mut on = Vec::with_capacity(support.len());
        let mut off = Vec::with_capacity(d - support.len());
        for i in 0..d {
            let g: f64 = rng.sample(StandardNormal);
            if wstar[i] != 0.0 {
                // g_i − λs_i = s_i(s_i g_i − λ)
                on.push(signs[i] * g);
            } else {
                off.push(g.abs());
            }
        }
        off.sort_by(|a, b| b.total_cmp(a));
        polar_distance_sq(&on, &off)
    });
    let stat_dim = WidthEstimate::from_samples(&values);
    Ok(ConeDimension { width: stat_dim.value.max(0.0).sqrt(), stat_dim, support: support.len(), dim: d })
}

fn std_normal_pdf(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn std_normal_tail(t: f64) -> f64 {
    0.5 * erfc(t / std::f64::consts::SQRT_2)
}

/// ρ(1+τ²) + (1−ρ)·2[(1+τ²)Q(τ) − τφ(τ)].
pub fn psi_objective(rho: f64, tau: f64) -> f64 {
    let tail = 2.0 * ((1.0 + tau * tau) * std_normal_tail(tau) - tau * std_normal_pdf(tau));
    rho * (1.0 + tau * tau) + (1.0 - rho) * tail.max(0.0)
}

/// ψ(ρ) = inf over τ ≥ 0 of the objective above, by golden section.
pub fn statistical_dimension_psi(rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::arg("rho", format!("must lie in [0, 1], got {rho}")));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let f = |t: f64| psi_objective(rho, t);
    let (t, v) = golden_min(f, 0.0, 40.0, 1e-10);
    let v0 = f(0.0);
    Ok(if v0 <= v { v0 } else { f(t).min(v) })
}

pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polar_distance_matches_scan() {
        let on = [0.3, -1.2];
        let mut off = vec![2.0f64, 0.1, 0.7, 1.5];
        off.sort_by(|a, b| b.total_cmp(a));
        let exact = polar_distance_sq(&on, &off);
        let scan = (0..200_000)
            .map(|i| i as f64 * 1e-5)
            .map(|lam| {
                on.iter().map(|v| (v - lam).powi(2)).sum::<f64>()
                    + off.iter().map(|v| (v - lam).max(0.0).powi(2)).sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        assert!((exact - scan).abs() < 1e-8, "{exact} vs {scan}");
    }

    #[test]
    fn psi_boundaries() {
        assert_eq!(statistical_dimension_psi(0.0).unwrap(), 0.0);
        assert!((statistical_dimension_psi(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(statistical_dimension_psi(1.5).is_err());
    }
}
