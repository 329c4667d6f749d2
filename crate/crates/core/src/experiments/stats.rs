use statrs::distribution::{Binomial, DiscreteCDF};

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Unbiased sample variance.
pub fn variance(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0)
}

pub fn std_dev(v: &[f64]) -> f64 {
    variance(v).sqrt()
}

/// Standard error of the mean.
pub fn std_error(v: &[f64]) -> f64 {
    (variance(v) / v.len() as f64).sqrt()
}

/// Large-sample standard error of the sample variance, √((m₄ − s⁴)/T).
pub fn variance_std_error(v: &[f64]) -> f64 {
    let m = mean(v);
    let t = v.len() as f64;
    let m4 = v.iter().map(|x| (x - m).powi(4)).sum::<f64>() / t;
    let s2 = variance(v);
    ((m4 - s2 * s2).max(0.0) / t).sqrt()
}

/// Smallest k with P(Bin(trials, rate) > k) ≤ significance: the most
/// failures still consistent with a true failure rate of `rate`.
pub fn max_failures(trials: usize, rate: f64, significance: f64) -> usize {
    if rate <= 0.0 {
        return 0;
    }
    if rate >= 1.0 {
        return trials;
    }
    let b = Binomial::new(rate, trials as u64).expect("valid binomial");
    (0..=trials as u64).find(|&k| b.cdf(k) >= 1.0 - significance).unwrap_or(trials as u64) as usize
}

pub const SIGNIFICANCE: f64 = 1e-3;

/// Allowed failure rate: nominal rate plus binomial slack.
pub fn allowed_failure_rate(trials: usize, rate: f64) -> f64 {
    max_failures(trials, rate, SIGNIFICANCE) as f64 / trials as f64
}

/// Least-squares slope of log y on log x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (mean(&lx), mean(&ly));
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_slack() {
        assert_eq!(max_failures(200, 0.0, 1e-3), 0);
        let k = max_failures(200, 0.05, 1e-3);
        assert!(k > 10 && k < 25);
        let b = Binomial::new(0.05, 200).unwrap();
        assert!(1.0 - b.cdf(k as u64) <= 1e-3);
        assert!(1.0 - b.cdf(k as u64 - 1) > 1e-3);
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(-0.25)).collect();
        assert!((loglog_slope(&x, &y) + 0.25).abs() < 1e-12);
    }
}
