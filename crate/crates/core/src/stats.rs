//! Small statistical helpers shared across the crate: order-statistic
//! quantiles, Wilson score intervals, simple OLS, and the two-sample
//! Kolmogorov-Smirnov test.

use crate::error::{Error, Result};
use statrs::distribution::{ContinuousCDF, Normal};

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Empirical `level`-quantile using the lower order-statistic convention:
/// the value at 1-based rank ceil(n * level), clamped to [1, n].
///
/// No interpolation is performed, so scaling every observation by a
/// constant maps the quantile by the same constant.
pub fn empirical_quantile(sorted_ascending: &[f64], level: f64) -> f64 {
    let n = sorted_ascending.len();
    assert!(n > 0, "quantile of empty sample");
    assert!((0.0..=1.0).contains(&level), "quantile level out of range");
    let rank = ((n as f64 * level).ceil() as usize).clamp(1, n);
    sorted_ascending[rank - 1]
}

/// Sorts a copy ascending (total order on floats) and takes the quantile.
pub fn quantile_of(xs: &[f64], level: f64) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    empirical_quantile(&v, level)
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Wilson score interval for `successes` out of `trials` at critical value
/// `z` (number of standard normal deviations).
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    assert!(trials > 0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Wilson-implied standard error: half-width of the interval divided by `z`.
/// Strictly positive even at zero successes, unlike the plug-in binomial SE.
pub fn wilson_se(successes: usize, trials: usize, z: f64) -> f64 {
    let (lo, hi) = wilson_interval(successes, trials, z);
    (hi - lo) / (2.0 * z)
}

/// Ordinary least squares of y on x with intercept.
/// Returns (slope, intercept, r_squared).
pub fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = mean(x);
    let my = mean(y);
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let e = b - (intercept + slope * a);
                e * e
            })
            .sum();
        1.0 - ss_res / syy
    };
    let _ = n;
    (slope, intercept, r2)
}

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("empty sample in KS test".into()));
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(f64::total_cmp);
    sb.sort_by(f64::total_cmp);
    let (n, m) = (sa.len(), sb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = sa[i].min(sb[j]);
        while i < n && sa[i] <= x {
            i += 1;
        }
        while j < m && sb[j] <= x {
            j += 1;
        }
        let gap = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        if gap > d {
            d = gap;
        }
    }
    Ok(d)
}

/// Asymptotic two-sample KS rejection threshold at significance `alpha`:
/// c(alpha) * sqrt((n + m) / (n m)) with c(alpha) = sqrt(-ln(alpha/2) / 2).
pub fn ks_two_sample_threshold(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * (((n + m) as f64) / (n as f64 * m as f64)).sqrt()
}
