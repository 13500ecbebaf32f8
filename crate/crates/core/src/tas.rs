//! Estimation of the tail stability measure from coupled draws.
//!
//! For a threshold y the per-lag measure is the sup over z >= y of
//! P(X_i* <= z | X_i > z). The estimator evaluates the conditional
//! probability on a data-driven grid of thresholds (log-spaced quantile
//! levels of the exceedance set, cut off where exceedance counts fall
//! below a floor) and reports both the grid sup and a Bonferroni-Wilson
//! upper confidence bound: the sup of noisy ratios is upward-biased,
//! and the dual report keeps that bias auditable.
//!
//! The module also aggregates the per-lag curve into the cumulative sum
//! sum_i theta(i)^{1/q}, evaluates the sufficiency-exponent table that
//! certifies q-stability from coefficient summability, and fits the
//! decay of log theta(i) against log |a_i|.

use crate::coefficients::CoefficientSeq;
use crate::error::{Error, Result};
use crate::processes::CoupledDraws;
use crate::stats::{normal_quantile, ols, wilson_interval, wilson_se};
use serde::{Deserialize, Serialize};

/// Grid construction policy for the threshold sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridPolicy {
    /// Number of quantile levels between the threshold and the deepest
    /// retained point.
    pub z_grid_size: usize,
    /// Minimum exceedance count a grid point must keep.
    pub min_exceed: usize,
    /// Total error level for the Bonferroni-adjusted Wilson upper bound.
    pub confidence: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy {
            z_grid_size: 50,
            min_exceed: 200,
            confidence: 0.01,
        }
    }
}

/// One grid point of the conditional-probability sweep.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ZPoint {
    pub z: f64,
    pub n_exceed: usize,
    pub successes: usize,
    pub p_hat: f64,
    /// Plug-in binomial standard error.
    pub se: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LagEstimate {
    pub lag: usize,
    /// Grid sup of the conditional-probability estimates.
    pub theta_hat: f64,
    /// Max over the grid of Wilson upper bounds at level
    /// confidence / grid-size.
    pub upper_conf: f64,
    /// Wilson-implied standard error at the argmax grid point.
    pub se_at_argmax: f64,
    pub n_exceed_at_y: usize,
    pub per_z: Vec<ZPoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaEstimate {
    pub y: f64,
    pub lags: Vec<usize>,
    pub per_lag: Vec<LagEstimate>,
    pub z_grid_size: usize,
    pub min_exceed: usize,
    pub confidence: f64,
}

impl ThetaEstimate {
    pub fn theta_hat(&self, lag: usize) -> Option<f64> {
        self.per_lag.iter().find(|l| l.lag == lag).map(|l| l.theta_hat)
    }

    pub fn lag_estimate(&self, lag: usize) -> Option<&LagEstimate> {
        self.per_lag.iter().find(|l| l.lag == lag)
    }

    /// Builds an estimate from bare point values (no grid diagnostics);
    /// used to feed synthetic or externally computed curves into the
    /// aggregation and fitting routines.
    pub fn from_point_estimates(y: f64, lags: Vec<usize>, thetas: Vec<f64>) -> Self {
        assert_eq!(lags.len(), thetas.len());
        let per_lag = lags
            .iter()
            .zip(&thetas)
            .map(|(&lag, &t)| LagEstimate {
                lag,
                theta_hat: t,
                upper_conf: t,
                se_at_argmax: 0.0,
                n_exceed_at_y: 0,
                per_z: Vec::new(),
            })
            .collect();
        ThetaEstimate {
            y,
            lags,
            per_lag,
            z_grid_size: 0,
            min_exceed: 0,
            confidence: 0.0,
        }
    }
}

/// Estimates the per-lag stability curve at threshold y.
///
/// Grid: quantile levels of the lag's exceedance set {x : x > y},
/// log-spaced in tail fraction from 1 down to min_exceed / n_y, mapped
/// to order statistics (no interpolation, so scaling data and y
/// together maps the grid exactly). Points whose strict exceedance
/// count falls below the floor are dropped; duplicates collapse.
pub fn estimate_theta_curve(
    draws: &CoupledDraws,
    y: f64,
    policy: &GridPolicy,
) -> Result<ThetaEstimate> {
    if policy.z_grid_size < 2 {
        return Err(Error::invalid("z_grid_size", "grid needs at least 2 levels"));
    }
    if policy.min_exceed < 1 {
        return Err(Error::invalid("min_exceed", "exceedance floor must be at least 1"));
    }
    if !(policy.confidence > 0.0 && policy.confidence < 1.0) {
        return Err(Error::invalid("confidence", "level must lie in (0,1)"));
    }
    let mut per_lag = Vec::with_capacity(draws.lags.len());
    for (idx, &lag) in draws.lags.iter().enumerate() {
        per_lag.push(estimate_one_lag(lag, &draws.pairs[idx], y, policy)?);
    }
    Ok(ThetaEstimate {
        y,
        lags: draws.lags.clone(),
        per_lag,
        z_grid_size: policy.z_grid_size,
        min_exceed: policy.min_exceed,
        confidence: policy.confidence,
    })
}

fn estimate_one_lag(
    lag: usize,
    pairs: &[(f64, f64)],
    y: f64,
    policy: &GridPolicy,
) -> Result<LagEstimate> {
    let mut exceed: Vec<(f64, f64)> = pairs.iter().copied().filter(|&(x, _)| x > y).collect();
    let n_y = exceed.len();
    if n_y < policy.min_exceed {
        return Err(Error::InsufficientExceedances {
            lag,
            count: n_y,
            required: policy.min_exceed,
        });
    }
    exceed.sort_by(|a, b| b.0.total_cmp(&a.0));

    // log-spaced tail fractions from 1 down to min_exceed / n_y
    let g = policy.z_grid_size;
    let t_min = policy.min_exceed as f64 / n_y as f64;
    let mut points: Vec<ZPoint> = Vec::with_capacity(g);
    let mut last_z = f64::NEG_INFINITY;
    for k in 0..g {
        let t = (t_min.ln() * k as f64 / (g - 1) as f64).exp();
        let rank = ((t * n_y as f64).ceil() as usize).clamp(1, n_y);
        let z = exceed[rank - 1].0;
        if z == last_z {
            continue;
        }
        last_z = z;
        let n_exceed = exceed.partition_point(|p| p.0 > z);
        if n_exceed < policy.min_exceed {
            continue;
        }
        let successes = exceed[..n_exceed].iter().filter(|p| p.1 <= z).count();
        let p_hat = successes as f64 / n_exceed as f64;
        points.push(ZPoint {
            z,
            n_exceed,
            successes,
            p_hat,
            se: (p_hat * (1.0 - p_hat) / n_exceed as f64).sqrt(),
        });
    }
    if points.is_empty() {
        return Err(Error::EmptyGrid { lag });
    }
    let z_crit = normal_quantile(1.0 - policy.confidence / points.len() as f64);
    let mut argmax = 0;
    let mut upper_conf = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        if p.p_hat > points[argmax].p_hat {
            argmax = i;
        }
        let (_, hi) = wilson_interval(p.successes, p.n_exceed, z_crit);
        upper_conf = upper_conf.max(hi);
    }
    let best = &points[argmax];
    Ok(LagEstimate {
        lag,
        theta_hat: best.p_hat,
        upper_conf,
        se_at_argmax: wilson_se(best.successes, best.n_exceed, z_crit),
        n_exceed_at_y: n_y,
        per_z: points,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ThetaSum {
    pub q: f64,
    /// sum_{i=0}^{i_max} theta_hat(i)^{1/q}.
    pub sum: f64,
    pub i_max: usize,
    /// Bound on the neglected tail sum_{i > i_max} (c |a_i|^eta)^{1/q}
    /// extrapolated from a decay fit, when one is available and finite.
    pub remainder_bound: Option<f64>,
}

/// Aggregates a contiguous-lag curve into sum theta^{1/q}.
pub fn aggregate_theta_sum(
    est: &ThetaEstimate,
    q: f64,
    decay: Option<(&DecayFit, &CoefficientSeq)>,
) -> Result<ThetaSum> {
    if !(q > 0.0) {
        return Err(Error::invalid("q", format!("stability order must be positive, got {q}")));
    }
    let i_max = *est.lags.last().ok_or_else(|| Error::invalid("est", "empty estimate"))?;
    if est.lags.len() != i_max + 1 || est.lags.iter().enumerate().any(|(i, &l)| i != l) {
        return Err(Error::invalid(
            "est",
            "aggregation needs contiguous lags 0..=i_max",
        ));
    }
    let sum = est
        .per_lag
        .iter()
        .map(|l| {
            if l.theta_hat == 0.0 {
                0.0
            } else {
                l.theta_hat.powf(1.0 / q)
            }
        })
        .sum();
    let remainder_bound = decay.and_then(|(fit, coeffs)| {
        let e = fit.eta_hat / q;
        coeffs
            .tail_sum_bound(e, i_max + 1)
            .map(|tail| fit.c_hat.powf(1.0 / q) * tail)
    });
    Ok(ThetaSum {
        q,
        sum,
        i_max,
        remainder_bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InnovationClass {
    General,
    SymmetricStable,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SufficiencyExponent {
    pub vartheta: f64,
    /// Which row of the case table fired.
    pub case: &'static str,
}

/// The exponent vartheta(nu, q, eps) such that sum_i |a_i|^vartheta < inf
/// certifies q-stability.
///
/// General innovations:
///   nu > 1, nu/(nu+2) > 1/q  ->  1/q
///   nu > 1, nu/(nu+2) <= 1/q ->  nu/(nu+2) - eps
///   nu <= 1, nu < q - 2      ->  nu/q - eps
///   nu <= 1, nu >= q - 2     ->  nu/(nu+2) - eps
/// Symmetric stable innovations (nu in (0,2)):
///   nu > 1 -> 1/q;   nu = 1 -> 1/q - eps;   nu < 1 -> nu/q
pub fn sufficiency_exponent(
    nu: f64,
    q: f64,
    eps: f64,
    class: InnovationClass,
) -> Result<SufficiencyExponent> {
    if !(nu > 0.0) {
        return Err(Error::invalid("nu", "tail index must be positive"));
    }
    if !(q > 0.0) {
        return Err(Error::invalid("q", "stability order must be positive"));
    }
    if eps < 0.0 {
        return Err(Error::invalid("eps", "slack must be non-negative"));
    }
    if class == InnovationClass::SymmetricStable && nu >= 2.0 {
        return Err(Error::invalid("nu", "stable index must lie in (0,2)"));
    }
    let needs_eps = |value: f64, case: &'static str| -> Result<SufficiencyExponent> {
        if eps == 0.0 {
            return Err(Error::invalid("eps", format!("case `{case}` subtracts eps; need eps > 0")));
        }
        let vartheta = value - eps;
        if vartheta <= 0.0 {
            return Err(Error::invalid(
                "eps",
                format!("eps = {eps} swallows the exponent {value} in case `{case}`"),
            ));
        }
        Ok(SufficiencyExponent { vartheta, case })
    };
    match class {
        InnovationClass::General => {
            let ratio = nu / (nu + 2.0);
            if nu > 1.0 {
                if ratio > 1.0 / q {
                    Ok(SufficiencyExponent {
                        vartheta: 1.0 / q,
                        case: "nu>1, nu/(nu+2) > 1/q",
                    })
                } else {
                    needs_eps(ratio, "nu>1, nu/(nu+2) <= 1/q")
                }
            } else if nu < q - 2.0 {
                needs_eps(nu / q, "nu<=1, nu < q-2")
            } else {
                needs_eps(ratio, "nu<=1, nu >= q-2")
            }
        }
        InnovationClass::SymmetricStable => {
            if nu > 1.0 {
                Ok(SufficiencyExponent {
                    vartheta: 1.0 / q,
                    case: "stable, nu>1",
                })
            } else if nu == 1.0 {
                needs_eps(1.0 / q, "stable, nu=1")
            } else {
                Ok(SufficiencyExponent {
                    vartheta: nu / q,
                    case: "stable, nu<1",
                })
            }
        }
    }
}

/// Default slope-deficit tolerance for the decay-fit PASS flag.
pub const SLOPE_TOLERANCE: f64 = 0.2;

#[derive(Clone, Debug, Serialize)]
pub struct DecayFit {
    pub c_hat: f64,
    pub eta_hat: f64,
    pub r_squared: f64,
    /// Smallest and largest lag entering the fit.
    pub lag_range: (usize, usize),
    /// Lags dropped because the estimate or the coefficient was zero.
    pub excluded_lags: Vec<usize>,
    pub target_slope: f64,
    pub pass: bool,
}

/// Least squares of log theta_hat(i) on log |a_i| over the usable lags.
/// Lags with a zero estimate or zero coefficient are excluded, not
/// imputed: exact zeros are structural, not small values.
pub fn fit_decay_exponent(
    est: &ThetaEstimate,
    coeffs: &CoefficientSeq,
    target_slope: f64,
) -> Result<DecayFit> {
    const REQUIRED: usize = 4;
    let mut log_a = Vec::new();
    let mut log_t = Vec::new();
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    let mut zero_theta = 0;
    let mut zero_coeff = 0;
    for l in &est.per_lag {
        let a = coeffs.coeff(l.lag);
        if a == 0.0 {
            zero_coeff += 1;
            excluded.push(l.lag);
            continue;
        }
        if l.theta_hat <= 0.0 {
            zero_theta += 1;
            excluded.push(l.lag);
            continue;
        }
        log_a.push(a.abs().ln());
        log_t.push(l.theta_hat.ln());
        used.push(l.lag);
    }
    if used.len() < REQUIRED {
        return Err(Error::InsufficientLags {
            required: REQUIRED,
            usable: used.len(),
            zero_theta,
            zero_coeff,
        });
    }
    let (slope, intercept, r2) = ols(&log_a, &log_t);
    Ok(DecayFit {
        c_hat: intercept.exp(),
        eta_hat: slope,
        r_squared: r2,
        lag_range: (*used.first().unwrap(), *used.last().unwrap()),
        excluded_lags: excluded,
        target_slope,
        pass: slope >= target_slope - SLOPE_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::processes::CoupledDraws;

    fn synthetic_draws(lags: Vec<usize>, pairs: Vec<Vec<(f64, f64)>>) -> CoupledDraws {
        let reps = pairs[0].len();
        CoupledDraws {
            lags,
            pairs,
            reps,
            seed: 0,
            eps0: vec![0.0; reps],
            eps0_star: vec![0.0; reps],
            vol0: None,
            vol0_star: None,
        }
    }

    #[test]
    fn degenerate_pairs_give_exact_zero() {
        let pairs: Vec<(f64, f64)> = (0..5000).map(|i| (i as f64, i as f64)).collect();
        let draws = synthetic_draws(vec![2], vec![pairs]);
        let est = estimate_theta_curve(&draws, 100.0, &GridPolicy::default()).unwrap();
        assert_eq!(est.theta_hat(2), Some(0.0));
        assert!(est.lag_estimate(2).unwrap().upper_conf > 0.0);
    }

    #[test]
    fn insufficient_exceedances_names_the_lag() {
        let pairs: Vec<(f64, f64)> = (0..100).map(|i| (i as f64, i as f64)).collect();
        let draws = synthetic_draws(vec![3], vec![pairs]);
        match estimate_theta_curve(&draws, 50.0, &GridPolicy::default()) {
            Err(Error::InsufficientExceedances { lag: 3, count, required }) => {
                assert_eq!(count, 49);
                assert_eq!(required, 200);
            }
            other => panic!("expected insufficient-exceedances error, got {other:?}"),
        }
    }

    #[test]
    fn scale_equivariance_under_dyadic_scaling() {
        // multiplying by a power of two is exact in binary floats, so
        // the quantile grid maps bijectively and every count agrees
        let mut pairs = Vec::new();
        let mut state = 1u64;
        for _ in 0..4000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = 1.0 + (state >> 11) as f64 / (1u64 << 53) as f64 * 9.0;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let xs = 1.0 + (state >> 11) as f64 / (1u64 << 53) as f64 * 9.0;
            pairs.push((x, xs));
        }
        for lambda in [0.25f64, 2.0, 1024.0] {
            let scaled: Vec<(f64, f64)> = pairs.iter().map(|&(x, s)| (lambda * x, lambda * s)).collect();
            let policy = GridPolicy {
                z_grid_size: 20,
                min_exceed: 50,
                confidence: 0.01,
            };
            let a = estimate_theta_curve(&synthetic_draws(vec![0], vec![pairs.clone()]), 2.0, &policy).unwrap();
            let b = estimate_theta_curve(&synthetic_draws(vec![0], vec![scaled]), 2.0 * lambda, &policy).unwrap();
            let pa: Vec<f64> = a.per_lag[0].per_z.iter().map(|p| p.p_hat).collect();
            let pb: Vec<f64> = b.per_lag[0].per_z.iter().map(|p| p.p_hat).collect();
            assert_eq!(pa, pb);
            assert_eq!(a.per_lag[0].theta_hat, b.per_lag[0].theta_hat);
        }
    }

    #[test]
    fn theta_monotone_in_threshold_on_shared_grid() {
        // raising y restricts the sweep, so the sup cannot grow beyond
        // grid resolution; check on the same draws with nested y
        let mut pairs = Vec::new();
        let mut state = 9u64;
        for _ in 0..20000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = ((state >> 11) as f64 / (1u64 << 53) as f64).max(1e-12);
            let x = u.powf(-0.5);
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let v = ((state >> 11) as f64 / (1u64 << 53) as f64).max(1e-12);
            // coupled value follows x half the time, fresh otherwise
            let xs = if state & 1 == 0 { x } else { v.powf(-0.5) };
            pairs.push((x, xs));
        }
        let policy = GridPolicy {
            z_grid_size: 30,
            min_exceed: 100,
            confidence: 0.01,
        };
        let low = estimate_theta_curve(&synthetic_draws(vec![0], vec![pairs.clone()]), 2.0, &policy).unwrap();
        let high = estimate_theta_curve(&synthetic_draws(vec![0], vec![pairs]), 4.0, &policy).unwrap();
        let se = high.per_lag[0].se_at_argmax + low.per_lag[0].se_at_argmax;
        assert!(high.per_lag[0].theta_hat <= low.per_lag[0].theta_hat + se);
    }

    #[test]
    fn aggregate_trivial_cases() {
        let est = ThetaEstimate::from_point_estimates(
            1.0,
            vec![0, 1, 2, 3],
            vec![1.0, 0.0, 0.0, 0.0],
        );
        for q in [1.0, 2.0, 4.0] {
            assert_eq!(aggregate_theta_sum(&est, q, None).unwrap().sum, 1.0);
        }
        let one_dep = ThetaEstimate::from_point_estimates(1.0, vec![0, 1, 2, 3], vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(aggregate_theta_sum(&one_dep, 3.0, None).unwrap().sum, 2.0);
    }

    #[test]
    fn aggregate_geometric_curve() {
        let lags: Vec<usize> = (0..40).collect();
        let thetas: Vec<f64> = (0..40i32).map(|i| 4f64.powi(-i)).collect();
        let est = ThetaEstimate::from_point_estimates(1.0, lags, thetas);
        let sum = aggregate_theta_sum(&est, 2.0, None).unwrap().sum;
        assert!((sum - 2.0).abs() < 1e-10);
    }

    #[test]
    fn aggregate_remainder_extrapolates_the_decay_fit() {
        // exact synthetic curve theta(i) = 0.3 |a_i| on power-decay
        // coefficients: the remainder bound is c^{1/q} times the
        // analytic tail sum of |a_i|^{eta/q}
        let coeffs = CoefficientSeq::power_decay(3.0, 1.0, 1.0, 1e-3).unwrap();
        let lags: Vec<usize> = (0..=6).collect();
        let thetas: Vec<f64> = lags.iter().map(|&i| 0.3 * coeffs.coeff(i)).collect();
        let est = ThetaEstimate::from_point_estimates(1.0, lags, thetas);
        let fit = fit_decay_exponent(&est, &coeffs, 1.0).unwrap();
        let q = 2.0;
        let sum = aggregate_theta_sum(&est, q, Some((&fit, &coeffs))).unwrap();
        let expected = fit.c_hat.powf(1.0 / q) * coeffs.tail_sum_bound(fit.eta_hat / q, 7).unwrap();
        let got = sum.remainder_bound.expect("finite remainder");
        assert!((got - expected).abs() < 1e-12 * expected);
        // direct check that the bound dominates the synthetic tail
        let direct: f64 = (7..=coeffs.truncation())
            .map(|i| (0.3 * coeffs.coeff(i)).powf(0.5))
            .sum();
        assert!(got >= direct);
        // a divergent extrapolation reports no bound
        let slow = CoefficientSeq::power_decay(1.9, 1.0, 1.0, 1e-2).unwrap();
        let lags: Vec<usize> = (0..=6).collect();
        let thetas: Vec<f64> = lags.iter().map(|&i| 0.3 * slow.coeff(i)).collect();
        let est = ThetaEstimate::from_point_estimates(1.0, lags, thetas);
        let fit = fit_decay_exponent(&est, &slow, 1.0).unwrap();
        // eta/q = 0.5, zeta * 0.5 = 0.95 <= 1: tail sum diverges
        let sum = aggregate_theta_sum(&est, 2.0, Some((&fit, &slow))).unwrap();
        assert!(sum.remainder_bound.is_none());
    }

    #[test]
    fn aggregate_rejects_bad_input() {
        let est = ThetaEstimate::from_point_estimates(1.0, vec![0, 2], vec![0.5, 0.5]);
        assert!(aggregate_theta_sum(&est, 2.0, None).is_err());
        let ok = ThetaEstimate::from_point_estimates(1.0, vec![0, 1], vec![0.5, 0.5]);
        assert!(aggregate_theta_sum(&ok, 0.0, None).is_err());
    }

    #[test]
    fn sufficiency_worked_examples() {
        let g = InnovationClass::General;
        assert_eq!(sufficiency_exponent(3.0, 2.0, 0.0, g).unwrap().vartheta, 0.5);
        let v = sufficiency_exponent(1.5, 2.0, 0.01, g).unwrap().vartheta;
        assert!((v - (1.5 / 3.5 - 0.01)).abs() < 1e-15);
        let v = sufficiency_exponent(0.5, 4.0, 0.01, g).unwrap().vartheta;
        assert!((v - 0.115).abs() < 1e-15);
        let v = sufficiency_exponent(0.5, 2.0, 0.01, g).unwrap().vartheta;
        assert!((v - (0.2 - 0.01)).abs() < 1e-15);
        let s = InnovationClass::SymmetricStable;
        assert_eq!(sufficiency_exponent(0.5, 4.0, 0.0, s).unwrap().vartheta, 0.125);
        assert_eq!(sufficiency_exponent(1.7, 3.0, 0.0, s).unwrap().vartheta, 1.0 / 3.0);
        let v = sufficiency_exponent(1.0, 2.0, 0.05, s).unwrap().vartheta;
        assert!((v - 0.45).abs() < 1e-15);
    }

    #[test]
    fn sufficiency_domain_errors() {
        let g = InnovationClass::General;
        assert!(sufficiency_exponent(-1.0, 2.0, 0.0, g).is_err());
        assert!(sufficiency_exponent(1.0, 0.0, 0.1, g).is_err());
        // eps required where the table subtracts it
        assert!(sufficiency_exponent(1.5, 2.0, 0.0, g).is_err());
        assert!(sufficiency_exponent(2.5, 2.0, 0.0, InnovationClass::SymmetricStable).is_err());
        // purity: same inputs, same output
        let a = sufficiency_exponent(1.5, 2.0, 0.01, g).unwrap();
        let b = sufficiency_exponent(1.5, 2.0, 0.01, g).unwrap();
        assert_eq!(a.vartheta, b.vartheta);
    }

    #[test]
    fn sufficiency_non_increasing_in_q() {
        let g = InnovationClass::General;
        let mut prev = f64::INFINITY;
        for q in [1.0, 2.0, 4.0, 8.0] {
            let v = sufficiency_exponent(3.0, q, 0.01, g).unwrap().vartheta;
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn decay_fit_recovers_exact_log_linear_curve() {
        let coeffs = CoefficientSeq::power_decay(2.0, 1.0, 1.0, 1e-3).unwrap();
        let lags: Vec<usize> = (1..=8).collect();
        let thetas: Vec<f64> = lags.iter().map(|&i| 0.3 * coeffs.coeff(i).abs()).collect();
        let est = ThetaEstimate::from_point_estimates(1.0, lags, thetas);
        let fit = fit_decay_exponent(&est, &coeffs, 1.0).unwrap();
        assert!((fit.eta_hat - 1.0).abs() < 1e-12);
        assert!((fit.c_hat - 0.3).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.pass);
        assert!(fit.excluded_lags.is_empty());
    }

    #[test]
    fn decay_fit_excludes_zero_lags() {
        let coeffs = CoefficientSeq::explicit(vec![1.0, 0.5, 0.25, 0.125, 0.0625, 0.0], 0.0).unwrap();
        let est = ThetaEstimate::from_point_estimates(
            1.0,
            vec![0, 1, 2, 3, 4, 5],
            vec![0.4, 0.2, 0.0, 0.05, 0.025, 0.3],
        );
        let fit = fit_decay_exponent(&est, &coeffs, 1.0).unwrap();
        assert_eq!(fit.excluded_lags, vec![2, 5]);
        assert_eq!(fit.lag_range, (0, 4));
    }

    #[test]
    fn decay_fit_needs_four_usable_lags() {
        let coeffs = CoefficientSeq::explicit(vec![1.0, 0.5, 0.25], 0.0).unwrap();
        let est = ThetaEstimate::from_point_estimates(1.0, vec![0, 1, 2], vec![0.4, 0.2, 0.1]);
        match fit_decay_exponent(&est, &coeffs, 1.0) {
            Err(Error::InsufficientLags { usable: 3, .. }) => {}
            other => panic!("expected lag census error, got {other:?}"),
        }
    }
}
