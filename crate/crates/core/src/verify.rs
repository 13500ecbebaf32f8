//! Exact analytic oracles and regular-variation diagnostics.
//!
//! Everything here is a pure function of its inputs: limiting tail
//! constants for linear and volatility-scaled processes, closed-form
//! distribution functions for the Frechet moving-maximum process
//! (including the exact conditional probability the coupled-pair
//! estimator targets), sum-stable marginal scales, the Hill estimator,
//! and a histogram-based density envelope check.

use crate::coefficients::CoefficientSeq;
use crate::error::{Error, Result};
use crate::processes::VolatilityLaw;
use serde::Serialize;

/// Which limiting tail ratio a [`TailConstants`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailCase {
    /// P(X > x) / P(|e| > x) for the plain linear process.
    LinearOnly,
    /// Volatility with lighter tail than the linear process.
    StochVolCaseI,
    /// Volatility with heavier tail than the linear process.
    StochVolCaseII,
}

/// Where the moments entering a constant came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentSource {
    Exact,
    MonteCarlo { draws: usize },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailConstants {
    pub a1: f64,
    pub a2: f64,
    pub case: TailCase,
    /// The limiting tail ratio for the requested case.
    pub constant: f64,
    pub moment_source: MomentSource,
}

/// Request for [`tail_constants`]. Case II carries the Monte-Carlo
/// moments of the linear process (E[X_+^beta], E[X_-^beta]) because no
/// closed form exists for them.
#[derive(Clone, Copy, Debug)]
pub enum TailCaseRequest {
    LinearOnly,
    CaseI,
    CaseII {
        x_plus_moment: f64,
        x_minus_moment: f64,
        mc_draws: usize,
    },
    CaseIII,
}

/// A1 = sum_j p (a_j)_+^nu + (1-p)(a_j)_-^nu and the mirror sum A2, the
/// right- and left-tail constants of the linear process relative to
/// P(|e| > x).
pub fn tail_balance_sums(coeffs: &CoefficientSeq, nu: f64, p: f64) -> (f64, f64) {
    let mut a1 = 0.0;
    let mut a2 = 0.0;
    for &a in coeffs.values() {
        if a > 0.0 {
            let w = a.powf(nu);
            a1 += p * w;
            a2 += (1.0 - p) * w;
        } else if a < 0.0 {
            let w = (-a).powf(nu);
            a1 += (1.0 - p) * w;
            a2 += p * w;
        }
    }
    (a1, a2)
}

/// Exact limiting tail constants for the requested case.
///
/// Case I needs a volatility law with a finite moment of order above nu;
/// its constant is A1 E[S_+^nu] + A2 E[S_-^nu]. Case II (heavier
/// volatility, index beta < nu) has constant q E[X_+^beta] +
/// (1-q) E[X_-^beta] with the X-moments supplied by the caller from
/// Monte Carlo and flagged as such. Case III (equal indices) is not
/// computable case-by-case and is rejected.
pub fn tail_constants(
    coeffs: &CoefficientSeq,
    nu: f64,
    p: f64,
    vol: Option<&VolatilityLaw>,
    case: TailCaseRequest,
) -> Result<TailConstants> {
    if !(nu > 0.0) {
        return Err(Error::invalid("nu", "tail index must be positive"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("p", "tail balance must lie in [0,1]"));
    }
    let (a1, a2) = tail_balance_sums(coeffs, nu, p);
    match case {
        TailCaseRequest::LinearOnly => {
            if a1 <= 0.0 {
                return Err(Error::invalid(
                    "coefficients",
                    "right tail of the linear process is degenerate (A1 = 0)",
                ));
            }
            Ok(TailConstants {
                a1,
                a2,
                case: TailCase::LinearOnly,
                constant: a1,
                moment_source: MomentSource::Exact,
            })
        }
        TailCaseRequest::CaseI => {
            let vol = vol.ok_or_else(|| Error::invalid("volatility", "case I needs a volatility law"))?;
            if vol.moment_order() <= nu {
                return Err(Error::invalid(
                    "volatility",
                    format!(
                        "case I needs E|S|^beta < inf for some beta > nu = {nu}; \
                         the volatility law has moment order {}",
                        vol.moment_order()
                    ),
                ));
            }
            let constant = a1 * vol.moment_pos(nu)? + a2 * vol.moment_neg(nu)?;
            if constant <= 0.0 {
                return Err(Error::invalid("volatility", "degenerate case I constant (A1 E[S_+^nu] + A2 E[S_-^nu] = 0)"));
            }
            Ok(TailConstants {
                a1,
                a2,
                case: TailCase::StochVolCaseI,
                constant,
                moment_source: MomentSource::Exact,
            })
        }
        TailCaseRequest::CaseII {
            x_plus_moment,
            x_minus_moment,
            mc_draws,
        } => {
            let vol = vol.ok_or_else(|| Error::invalid("volatility", "case II needs a volatility law"))?;
            let q = match vol {
                VolatilityLaw::Heavy { law } if law.index() < nu => law.balance(),
                VolatilityLaw::Heavy { law } => {
                    return Err(Error::invalid(
                        "volatility",
                        format!("case II needs volatility index beta < nu = {nu}, got {}", law.index()),
                    ))
                }
                VolatilityLaw::TwoPoint { .. } => {
                    return Err(Error::invalid("volatility", "case II needs a heavy-tailed volatility law"))
                }
            };
            let constant = q * x_plus_moment + (1.0 - q) * x_minus_moment;
            if constant <= 0.0 {
                return Err(Error::invalid("volatility", "degenerate case II constant"));
            }
            Ok(TailConstants {
                a1,
                a2,
                case: TailCase::StochVolCaseII,
                constant,
                moment_source: MomentSource::MonteCarlo { draws: mc_draws },
            })
        }
        TailCaseRequest::CaseIII => Err(Error::Unsupported(
            "case III (equal volatility and innovation indices): the tail need not be \
             regularly varying in every configuration; check the index empirically with \
             hill_estimate instead"
                .into(),
        )),
    }
}

fn frechet_exponent(coeffs: &CoefficientSeq, nu: f64, scale: f64, x: f64) -> f64 {
    (x / scale).powf(-nu) * coeffs.abs_power_sum(nu)
}

/// Marginal cdf of the Frechet moving-maximum process:
/// P(X_0 <= x) = exp(-(x/scale)^{-nu} sum_j a_j^nu).
pub fn frechet_maxlinear_cdf(coeffs: &CoefficientSeq, nu: f64, scale: f64, x: f64) -> Result<f64> {
    check_frechet_args(coeffs, nu, scale, x)?;
    Ok((-frechet_exponent(coeffs, nu, scale, x)).exp())
}

/// Exact marginal quantile of the Frechet moving-maximum process.
pub fn frechet_maxlinear_quantile(
    coeffs: &CoefficientSeq,
    nu: f64,
    scale: f64,
    level: f64,
) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid("level", "quantile level must lie in (0,1)"));
    }
    check_frechet_args(coeffs, nu, scale, 1.0)?;
    let a = coeffs.abs_power_sum(nu);
    Ok(scale * (-level.ln() / a).powf(-1.0 / nu))
}

/// Joint cdf P(X_t <= u, X_{t+k} <= v) for the Frechet moving-maximum
/// process: the product over innovations, where an innovation shared by
/// both observations contributes through the tighter of the two
/// constraints (coefficient maxima).
pub fn frechet_maxlinear_bivariate_cdf(
    coeffs: &CoefficientSeq,
    nu: f64,
    scale: f64,
    u: f64,
    v: f64,
    lag: usize,
) -> Result<f64> {
    check_frechet_args(coeffs, nu, scale, u.min(v))?;
    let m = coeffs.truncation() as i64;
    let k = lag as i64;
    let su = (u / scale).powf(-nu);
    let sv = (v / scale).powf(-nu);
    let mut exponent = 0.0;
    // innovation at time t - j constrains X_t through a_j and X_{t+k}
    // through a_{j+k}
    for j in -k..=m {
        let first = if j >= 0 { coeffs.coeff(j as usize).powf(nu) * su } else { 0.0 };
        let second = if j + k <= m {
            coeffs.coeff((j + k) as usize).powf(nu) * sv
        } else {
            0.0
        };
        exponent += first.max(second);
    }
    Ok((-exponent).exp())
}

/// Exact conditional probabilities P(X_i* <= z | X_i > z) for the
/// Frechet moving-maximum process on a grid, and their sup.
///
/// The event {X_i > z, X_i* <= z} factors into the independent events
/// {Y_i <= z}, {a_i e_0 > z}, {a_i e_0* <= z}, so
/// theta(z) = P(Y_i <= z) P(a_i e_0* <= z) P(a_i e_0 > z) / P(X_0 > z).
/// A zero coefficient at the lag gives exact zeros, not an error.
pub fn frechet_theta_exact(
    coeffs: &CoefficientSeq,
    nu: f64,
    scale: f64,
    lag: usize,
    z_grid: &[f64],
) -> Result<FrechetThetaExact> {
    check_frechet_args(coeffs, nu, scale, 1.0)?;
    if z_grid.is_empty() {
        return Err(Error::invalid("z_grid", "need at least one grid point"));
    }
    if z_grid.iter().any(|&z| !(z > 0.0)) {
        return Err(Error::invalid("z_grid", "grid points must be positive"));
    }
    let a_total = coeffs.abs_power_sum(nu);
    let ai = coeffs.coeff(lag);
    let mut per_z = Vec::with_capacity(z_grid.len());
    let mut sup = 0.0f64;
    for &z in z_grid {
        let t = (z / scale).powf(-nu);
        let theta = if ai == 0.0 {
            0.0
        } else {
            let ai_nu = ai.powf(nu);
            let p_y = (-(t * (a_total - ai_nu))).exp();
            let p_star_le = (-(t * ai_nu)).exp();
            let p_gt = -(-(t * ai_nu)).exp_m1();
            let p_x_gt = -(-(t * a_total)).exp_m1();
            p_y * p_star_le * p_gt / p_x_gt
        };
        sup = sup.max(theta);
        per_z.push((z, theta));
    }
    Ok(FrechetThetaExact { lag, per_z, sup })
}

#[derive(Clone, Debug, Serialize)]
pub struct FrechetThetaExact {
    pub lag: usize,
    /// (z, exact conditional probability) along the grid.
    pub per_z: Vec<(f64, f64)>,
    pub sup: f64,
}

fn check_frechet_args(coeffs: &CoefficientSeq, nu: f64, scale: f64, x: f64) -> Result<()> {
    if !(nu > 0.0) {
        return Err(Error::invalid("nu", "tail index must be positive"));
    }
    if !(scale > 0.0) {
        return Err(Error::invalid("scale", "scale must be positive"));
    }
    if !coeffs.all_nonnegative() {
        return Err(Error::invalid("coefficients", "max-linear coefficients must be non-negative"));
    }
    if !(x > 0.0) {
        return Err(Error::invalid("x", "evaluation point must be positive"));
    }
    Ok(())
}

/// (sum_{j != excluded} |a_j|^nu)^{1/nu}, the marginal scale of the
/// lag-excluded sum of a symmetric nu-stable linear process.
pub fn stable_marginal_scale(
    coeffs: &CoefficientSeq,
    nu: f64,
    excluded_lag: Option<usize>,
) -> Result<f64> {
    if !(nu > 0.0 && nu < 2.0) {
        return Err(Error::invalid("nu", "stable index must lie in (0,2)"));
    }
    let mut sum = 0.0;
    for (j, &a) in coeffs.values().iter().enumerate() {
        if excluded_lag != Some(j) && a != 0.0 {
            sum += a.abs().powf(nu);
        }
    }
    if sum == 0.0 {
        return Err(Error::invalid("coefficients", "all coefficients are zero after exclusion"));
    }
    Ok(sum.powf(1.0 / nu))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HillEstimate {
    pub nu_hat: f64,
    pub se: f64,
    pub k: usize,
}

/// Hill estimator of the tail index from the top k order statistics:
/// nu_hat = k / sum_{j=1}^{k} ln(X_(j) / X_(k+1)) over the descending
/// positive part of the sample, with SE = nu_hat / sqrt(k). Ratios
/// cancel any scale factor; adding a location shift changes the result.
pub fn hill_estimate(sample: &[f64], k: usize) -> Result<HillEstimate> {
    if k < 10 {
        return Err(Error::invalid("k", format!("need k >= 10 order statistics, got {k}")));
    }
    let mut pos: Vec<f64> = sample.iter().copied().filter(|&x| x > 0.0).collect();
    if pos.len() < k + 1 {
        return Err(Error::InsufficientData(format!(
            "hill estimator needs more than k = {k} positive values, found {}",
            pos.len()
        )));
    }
    pos.sort_by(|a, b| b.total_cmp(a));
    let x_k1 = pos[k];
    let log_sum: f64 = pos[..k].iter().map(|&x| (x / x_k1).ln()).sum();
    if log_sum <= 0.0 {
        return Err(Error::InsufficientData(
            "top order statistics are tied; Hill log-spacings vanish".into(),
        ));
    }
    let nu_hat = k as f64 / log_sum;
    Ok(HillEstimate {
        nu_hat,
        se: nu_hat / (k as f64).sqrt(),
        k,
    })
}

/// Default number of top order statistics: n/100, at least 10, capped
/// at 10^4.
pub fn hill_default_k(n: usize) -> usize {
    (n / 100).clamp(10, 10_000)
}

/// Log-spaced histogram grid for the density envelope check.
#[derive(Clone, Copy, Debug)]
pub struct EnvelopeGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub bins: usize,
}

impl EnvelopeGrid {
    pub fn new(x_min: f64, x_max: f64, bins: usize) -> Result<Self> {
        if !(x_min > 0.0 && x_max >= 20.0 * x_min) || bins < 4 {
            return Err(Error::invalid(
                "grid",
                "need 0 < x_min and x_max >= 20 x_min (the outermost decade is the test region), at least 4 bins",
            ));
        }
        Ok(EnvelopeGrid { x_min, x_max, bins })
    }

    fn edges(&self) -> Vec<f64> {
        let ratio = self.x_max / self.x_min;
        (0..=self.bins)
            .map(|i| self.x_min * ratio.powf(i as f64 / self.bins as f64))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeLagReport {
    pub lag: usize,
    pub max_inner_ratio: f64,
    pub max_outer_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnvelopeCheck {
    /// Envelope constant fitted on the inner half of the grid across all
    /// lags simultaneously.
    pub c_hat: f64,
    pub pass: bool,
    pub delta: f64,
    pub per_lag: Vec<EnvelopeLagReport>,
}

/// Checks that histogram density estimates of |Y_i| are dominated by a
/// single envelope c * min(1, x^{-nu-1+delta}) across all supplied lags.
///
/// The constant is fitted as the max density/envelope ratio over the
/// grid up to x_max / 10 (all lags pooled, so the fitted c is
/// lag-uniform and covers the bounded body including the mode); the
/// check passes when the same constant dominates the outermost decade
/// too. A density decaying slower than the envelope shape makes the
/// outer ratios grow past the inner fit and fails the check. Bins with
/// fewer than 20 observations are skipped as noise.
pub fn density_envelope_check(
    samples_by_lag: &[(usize, &[f64])],
    nu: f64,
    delta: f64,
    grid: &EnvelopeGrid,
) -> Result<EnvelopeCheck> {
    if !(delta > 0.0 && delta < nu + 1.0) {
        return Err(Error::invalid("delta", format!("need delta in (0, nu+1), got {delta}")));
    }
    if samples_by_lag.is_empty() {
        return Err(Error::InsufficientData("no lags supplied".into()));
    }
    for (lag, s) in samples_by_lag {
        if s.len() < 100_000 {
            return Err(Error::InsufficientData(format!(
                "lag {lag}: envelope check needs at least 1e5 samples, got {}",
                s.len()
            )));
        }
    }
    const MIN_BIN_COUNT: usize = 20;
    let edges = grid.edges();
    let x_split = grid.x_max / 10.0;
    let envelope = |x: f64| x.powf(-nu - 1.0 + delta).min(1.0);
    let mut c_hat = 0.0f64;
    let mut per_lag_ratios: Vec<(usize, Vec<(f64, f64)>)> = Vec::new();
    for (lag, s) in samples_by_lag {
        let n = s.len() as f64;
        let mut counts = vec![0usize; grid.bins];
        for &x in s.iter() {
            let a = x.abs();
            if a >= grid.x_min && a < grid.x_max {
                let idx = ((a / grid.x_min).ln() / (grid.x_max / grid.x_min).ln()
                    * grid.bins as f64)
                    .floor() as usize;
                counts[idx.min(grid.bins - 1)] += 1;
            }
        }
        let mut ratios = Vec::new();
        for (b, &count) in counts.iter().enumerate() {
            if count < MIN_BIN_COUNT {
                continue;
            }
            let (lo, hi) = (edges[b], edges[b + 1]);
            let density = count as f64 / (n * (hi - lo));
            let x_eval = (lo * hi).sqrt();
            let ratio = density / envelope(x_eval);
            ratios.push((x_eval, ratio));
            if x_eval <= x_split {
                c_hat = c_hat.max(ratio);
            }
        }
        per_lag_ratios.push((*lag, ratios));
    }
    if c_hat <= 0.0 {
        return Err(Error::InsufficientData(
            "no populated bins in the inner grid region".into(),
        ));
    }
    let mut pass = true;
    let per_lag = per_lag_ratios
        .into_iter()
        .map(|(lag, ratios)| {
            let max_inner = ratios
                .iter()
                .filter(|(x, _)| *x <= x_split)
                .map(|(_, r)| *r)
                .fold(0.0f64, f64::max);
            let max_outer = ratios
                .iter()
                .filter(|(x, _)| *x > x_split)
                .map(|(_, r)| *r)
                .fold(0.0f64, f64::max);
            if max_outer > c_hat {
                pass = false;
            }
            EnvelopeLagReport {
                lag,
                max_inner_ratio: max_inner,
                max_outer_ratio: max_outer,
            }
        })
        .collect();
    Ok(EnvelopeCheck {
        c_hat,
        pass,
        delta,
        per_lag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(values: &[f64]) -> CoefficientSeq {
        CoefficientSeq::explicit(values.to_vec(), 0.0).unwrap()
    }

    #[test]
    fn balance_sums_positive_case() {
        let (a1, a2) = tail_balance_sums(&coeffs(&[1.0, 0.5]), 1.0, 1.0);
        assert!((a1 - 1.5).abs() < 1e-15);
        assert_eq!(a2, 0.0);
    }

    #[test]
    fn balance_sums_symmetric_case() {
        let (a1, a2) = tail_balance_sums(&coeffs(&[1.0, -1.0]), 2.0, 0.5);
        assert!((a1 - 1.0).abs() < 1e-15);
        assert!((a2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn balance_sum_total_is_p_invariant() {
        let c = coeffs(&[1.0, -0.5, 0.25, -0.125]);
        let nu = 1.7;
        let total = c.abs_power_sum(nu);
        for &p in &[0.0, 0.2, 0.5, 0.9, 1.0] {
            let (a1, a2) = tail_balance_sums(&c, nu, p);
            assert!((a1 + a2 - total).abs() < 1e-12);
        }
    }

    #[test]
    fn case_one_degenerate_volatility_reduces_to_a1() {
        let c = coeffs(&[1.0, 0.5]);
        let vol = VolatilityLaw::TwoPoint { lo: 1.0, hi: 1.0, p_hi: 0.5 };
        let tc = tail_constants(&c, 2.0, 1.0, Some(&vol), TailCaseRequest::CaseI).unwrap();
        assert!((tc.constant - tc.a1).abs() < 1e-15);
    }

    #[test]
    fn case_three_is_rejected() {
        let c = coeffs(&[1.0]);
        assert!(matches!(
            tail_constants(&c, 2.0, 1.0, None, TailCaseRequest::CaseIII),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn frechet_cdf_examples() {
        let c = coeffs(&[1.0, 0.5]);
        let f = frechet_maxlinear_cdf(&c, 1.0, 1.0, 1.0).unwrap();
        assert!((f - (-1.5f64).exp()).abs() < 1e-15);
        assert!((f - 0.223_130).abs() < 1e-6);
        let single = coeffs(&[1.0]);
        for &x in &[0.5, 2.0] {
            let f = frechet_maxlinear_cdf(&single, 2.0, 1.0, x).unwrap();
            assert!((f - (-x.powf(-2.0)).exp()).abs() < 1e-15);
        }
        assert!(frechet_maxlinear_cdf(&c, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn frechet_tail_ratio_reaches_power_sum() {
        let c = coeffs(&[1.0, 0.5]);
        let x = 1e3;
        let surv = 1.0 - frechet_maxlinear_cdf(&c, 1.0, 1.0, x).unwrap();
        let innov_surv = 1.0 - (-x.powf(-1.0)).exp();
        assert!((surv / innov_surv - 1.5).abs() < 1.5e-3);
    }

    #[test]
    fn frechet_quantile_inverts_cdf() {
        let c = coeffs(&[1.0, 0.5, 0.25]);
        let q = frechet_maxlinear_quantile(&c, 1.0, 1.0, 0.95).unwrap();
        assert!((frechet_maxlinear_cdf(&c, 1.0, 1.0, q).unwrap() - 0.95).abs() < 1e-12);
    }

    #[test]
    fn bivariate_cdf_factorizes_beyond_dependence_range() {
        let c = coeffs(&[1.0, 0.5]);
        let (u, v) = (3.0, 5.0);
        let joint = frechet_maxlinear_bivariate_cdf(&c, 1.0, 1.0, u, v, 7).unwrap();
        let prod = frechet_maxlinear_cdf(&c, 1.0, 1.0, u).unwrap()
            * frechet_maxlinear_cdf(&c, 1.0, 1.0, v).unwrap();
        assert!((joint - prod).abs() < 1e-15);
    }

    #[test]
    fn bivariate_cdf_shared_innovation_value() {
        // a = (1,1), nu = 1, lag 1: shared innovation constrained by
        // min(x, x), total exponent 3/x at u = v = x.
        let c = coeffs(&[1.0, 1.0]);
        let x = 199.0;
        let joint = frechet_maxlinear_bivariate_cdf(&c, 1.0, 1.0, x, x, 1).unwrap();
        assert!((joint - (-3.0 / x).exp()).abs() < 1e-15);
    }

    #[test]
    fn theta_exact_worked_example() {
        let c = coeffs(&[1.0, 0.5]);
        let out = frechet_theta_exact(&c, 1.0, 1.0, 1, &[1.0]).unwrap();
        let expect = (-1.5f64).exp() * (1.0 - (-0.5f64).exp()) / (1.0 - (-1.5f64).exp());
        assert!((out.sup - expect).abs() < 1e-15);
        assert!((out.sup - 0.11301).abs() < 5e-6);
    }

    #[test]
    fn theta_exact_zero_coefficient_is_zero() {
        let c = coeffs(&[1.0, 0.0, 0.5]);
        let out = frechet_theta_exact(&c, 1.0, 1.0, 1, &[1.0, 2.0, 4.0]).unwrap();
        assert_eq!(out.sup, 0.0);
        assert!(out.per_z.iter().all(|&(_, t)| t == 0.0));
    }

    #[test]
    fn theta_exact_vanishes_for_small_coefficient() {
        let z = 2.0;
        let big = frechet_theta_exact(&coeffs(&[1.0, 0.5]), 1.0, 1.0, 1, &[z]).unwrap();
        let small = frechet_theta_exact(&coeffs(&[1.0, 1e-6]), 1.0, 1.0, 1, &[z]).unwrap();
        assert!(small.sup < 1e-5 && small.sup < big.sup);
    }

    #[test]
    fn exact_sup_decays_at_least_like_a_sub_nu_power() {
        // log-log slope of the exact grid sup across lags stays above
        // eta = 0.8 < nu = 1 for power-decay coefficients
        let c = CoefficientSeq::power_decay(2.0, 1.0, 1.0, 1e-3).unwrap();
        let z_grid: Vec<f64> = (0..60).map(|i| 20.0 * 1.12f64.powi(i)).collect();
        let mut log_a = Vec::new();
        let mut log_sup = Vec::new();
        for lag in 1..=8 {
            let sup = frechet_theta_exact(&c, 1.0, 1.0, lag, &z_grid).unwrap().sup;
            log_a.push(c.coeff(lag).ln());
            log_sup.push(sup.ln());
        }
        let (slope, _, _) = crate::stats::ols(&log_a, &log_sup);
        assert!(slope >= 0.8, "exact-sup slope {slope}");
    }

    #[test]
    fn stable_scale_examples() {
        let c = coeffs(&[1.0, 1.0, 1.0]);
        assert!((stable_marginal_scale(&c, 1.0, Some(1)).unwrap() - 2.0).abs() < 1e-15);
        let single = coeffs(&[1.0]);
        assert!((stable_marginal_scale(&single, 1.5, None).unwrap() - 1.0).abs() < 1e-15);
        let pyth = coeffs(&[3.0, 4.0]);
        assert!((stable_marginal_scale(&pyth, 1.99, None).unwrap()
            - (3f64.powf(1.99) + 4f64.powf(1.99)).powf(1.0 / 1.99))
        .abs()
            < 1e-12);
        assert!(stable_marginal_scale(&single, 1.0, Some(0)).is_err());
    }

    #[test]
    fn hill_on_deterministic_inverse_grid() {
        // x_j = u_j^{-1/2} on an equally spaced grid recovers nu = 2
        let n = 100_000;
        let sample: Vec<f64> = (1..=n)
            .map(|j| (j as f64 / (n as f64 + 1.0)).powf(-0.5))
            .collect();
        let est = hill_estimate(&sample, n / 10).unwrap();
        assert!(
            (est.nu_hat - 2.0).abs() < 0.1,
            "nu_hat = {} +- {}",
            est.nu_hat,
            est.se
        );
    }

    #[test]
    fn frechet_cdf_monotone_in_x_and_inverse_coefficients() {
        let base = coeffs(&[1.0, 0.5, 0.25]);
        let mut prev = 0.0;
        for i in 1..40 {
            let x = 0.1 * i as f64;
            let f = frechet_maxlinear_cdf(&base, 1.5, 1.0, x).unwrap();
            assert!(f >= prev);
            prev = f;
        }
        // shrinking any coefficient raises the cdf
        let smaller = coeffs(&[1.0, 0.2, 0.25]);
        for &x in &[0.5, 1.0, 4.0] {
            assert!(
                frechet_maxlinear_cdf(&smaller, 1.5, 1.0, x).unwrap()
                    >= frechet_maxlinear_cdf(&base, 1.5, 1.0, x).unwrap()
            );
        }
    }

    #[test]
    fn hill_is_location_sensitive() {
        let sample: Vec<f64> = (1..=5000).map(|j| (j as f64 / 5001.0).powf(-0.5)).collect();
        let shifted: Vec<f64> = sample.iter().map(|x| x + 10.0).collect();
        let a = hill_estimate(&sample, 200).unwrap();
        let b = hill_estimate(&shifted, 200).unwrap();
        assert!((a.nu_hat - b.nu_hat).abs() > 0.5, "{} vs {}", a.nu_hat, b.nu_hat);
    }

    #[test]
    fn hill_is_scale_invariant() {
        let sample: Vec<f64> = (1..=2000).map(|j| (j as f64 / 2001.0).powf(-1.0)).collect();
        let scaled: Vec<f64> = sample.iter().map(|x| 17.5 * x).collect();
        let a = hill_estimate(&sample, 100).unwrap();
        let b = hill_estimate(&scaled, 100).unwrap();
        assert_eq!(a.nu_hat, b.nu_hat);
    }

    #[test]
    fn hill_rejects_ties_and_small_k() {
        let tied = vec![2.0; 100];
        assert!(hill_estimate(&tied, 20).is_err());
        assert!(hill_estimate(&tied, 5).is_err());
    }

    #[test]
    fn hill_default_k_bounds() {
        assert_eq!(hill_default_k(1_000_000), 10_000);
        assert_eq!(hill_default_k(50_000), 500);
        assert_eq!(hill_default_k(500), 10);
    }
}
