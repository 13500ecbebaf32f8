//! Tail statistics on observed or simulated paths: sample tail
//! autocorrelation with block-bootstrap intervals, the tail empirical
//! distribution with its CLT normalization, and high quantile
//! regression through the check function.

use crate::error::{Error, Result};
use crate::heavy_tails::TailLaw;
use crate::rng::stream_rng;
use crate::simplex::solve_check_lp;
use crate::stats::empirical_quantile;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Block-bootstrap settings for the tail-autocorrelation intervals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapPolicy {
    pub resamples: usize,
    /// Two-sided interval coverage, e.g. 0.95.
    pub confidence: f64,
    /// Moving-block length; defaults to ceil(n^{1/3}).
    pub block_len: Option<usize>,
}

impl Default for BootstrapPolicy {
    fn default() -> Self {
        BootstrapPolicy {
            resamples: 500,
            confidence: 0.95,
            block_len: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TauPoint {
    pub k: usize,
    pub tau_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailAutocorr {
    pub x_n: f64,
    /// Exceedance fraction of the full path.
    pub t_hat: f64,
    pub n_exceed: usize,
    pub block_len: usize,
    pub taus: Vec<TauPoint>,
}

/// Standardized conditional exceedance probability per lag:
/// tau(k) = (P(X_{1+k} > x | X_1 > x) - P(X > x)) / (1 - P(X > x)),
/// estimated over overlapping pairs. tau(0) = 1 identically. The
/// statistic depends on the path only through exceedance indicators, so
/// it is invariant under strictly increasing transforms applied to both
/// the path and the threshold.
///
/// Intervals: moving-block bootstrap normal intervals (point estimate
/// +- z times the resample standard deviation), widened by the Wilson
/// interval of the raw joint/base counts. The bootstrap carries the
/// serial-dependence inflation, but with only a handful of joint
/// exceedances its plug-in variance collapses around extreme draws;
/// the Wilson bound restores coverage there.
pub fn sample_tail_autocorrelation(
    path: &[f64],
    x_n: f64,
    k_max: usize,
    policy: &BootstrapPolicy,
    seed: u64,
) -> Result<TailAutocorr> {
    let n = path.len();
    if n <= k_max {
        return Err(Error::invalid("k_max", format!("path length {n} must exceed k_max {k_max}")));
    }
    if policy.resamples == 0 || !(policy.confidence > 0.0 && policy.confidence < 1.0) {
        return Err(Error::invalid("bootstrap", "need resamples >= 1 and confidence in (0,1)"));
    }
    let ind: Vec<u8> = path.iter().map(|&x| u8::from(x > x_n)).collect();
    let n_exceed: usize = ind.iter().map(|&b| b as usize).sum();
    if n_exceed < 30 {
        return Err(Error::InsufficientExceedances {
            lag: 0,
            count: n_exceed,
            required: 30,
        });
    }
    let point = tau_counts_from_indicators(&ind, k_max)?;
    let t_hat_all = n_exceed as f64 / n as f64;
    let block_len = policy
        .block_len
        .unwrap_or_else(|| (n as f64).powf(1.0 / 3.0).ceil() as usize)
        .clamp(1, n);
    let n_blocks = n.div_ceil(block_len);
    let resampled: Vec<Vec<f64>> = (0..policy.resamples as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b);
            let mut boot = Vec::with_capacity(n_blocks * block_len);
            for _ in 0..n_blocks {
                let start = rng.random_range(0..=n - block_len);
                boot.extend_from_slice(&ind[start..start + block_len]);
            }
            boot.truncate(n);
            // resamples keep the original exceedance scale, so the tau
            // recomputation can only fail if a resample lost every
            // exceedance in its first n - k entries; treat those as 0.
            tau_from_indicators(&boot, k_max).unwrap_or_else(|_| vec![0.0; k_max + 1])
        })
        .collect();
    let z = crate::stats::normal_quantile(0.5 + policy.confidence / 2.0);
    let taus = (0..=k_max)
        .map(|k| {
            let (tau_hat, joint, base) = point[k];
            let vals: Vec<f64> = resampled.iter().map(|r| r[k]).collect();
            let sd = if vals.len() > 1 {
                crate::stats::variance(&vals).sqrt()
            } else {
                0.0
            };
            // Wilson bounds on the conditional probability, mapped
            // through the tau standardization
            let (w_lo, w_hi) = crate::stats::wilson_interval(joint, base, z);
            let tau_w_lo = (w_lo - t_hat_all) / (1.0 - t_hat_all);
            let tau_w_hi = (w_hi - t_hat_all) / (1.0 - t_hat_all);
            TauPoint {
                k,
                tau_hat,
                ci_lo: (tau_hat - z * sd).min(tau_w_lo),
                ci_hi: (tau_hat + z * sd).max(tau_w_hi),
            }
        })
        .collect();
    Ok(TailAutocorr {
        x_n,
        t_hat: n_exceed as f64 / n as f64,
        n_exceed,
        block_len,
        taus,
    })
}

fn tau_from_indicators(ind: &[u8], k_max: usize) -> Result<Vec<f64>> {
    Ok(tau_counts_from_indicators(ind, k_max)?
        .into_iter()
        .map(|(tau, _, _)| tau)
        .collect())
}

/// (tau_hat, joint count, base count) per lag.
fn tau_counts_from_indicators(ind: &[u8], k_max: usize) -> Result<Vec<(f64, usize, usize)>> {
    let n = ind.len();
    let total: usize = ind.iter().map(|&b| b as usize).sum();
    let t_hat = total as f64 / n as f64;
    if total == 0 || total == n {
        return Err(Error::InsufficientData("degenerate exceedance indicators".into()));
    }
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k == 0 {
            out.push((1.0, total, total));
            continue;
        }
        let mut base = 0usize;
        let mut joint = 0usize;
        for i in 0..n - k {
            if ind[i] == 1 {
                base += 1;
                joint += ind[i + k] as usize;
            }
        }
        if base == 0 {
            return Err(Error::InsufficientData(format!(
                "no exceedances among the first {} observations at lag {k}",
                n - k
            )));
        }
        let cond = joint as f64 / base as f64;
        out.push(((cond - t_hat) / (1.0 - t_hat), joint, base));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TailEmpirical {
    /// Exceedance fraction; n * t_hat is an exact integer.
    pub t_hat: f64,
    pub n_exceed: usize,
    /// sqrt(n / (t_hat (1 - t_hat))) * (t_hat - reference), when a
    /// population or reference value was supplied.
    pub clt_stat: Option<f64>,
}

/// Tail empirical distribution at threshold x_n, optionally studentized
/// against a reference tail probability (closed form in simulation
/// mode, user-supplied otherwise).
pub fn tail_empirical_clt(path: &[f64], x_n: f64, reference: Option<f64>) -> Result<TailEmpirical> {
    let n = path.len();
    if n == 0 {
        return Err(Error::InsufficientData("empty path".into()));
    }
    let n_exceed = path.iter().filter(|&&x| x > x_n).count();
    if n_exceed == 0 || n_exceed == n {
        return Err(Error::InsufficientData(format!(
            "all-or-none exceedances ({n_exceed} of {n}) at threshold {x_n}"
        )));
    }
    let t_hat = n_exceed as f64 / n as f64;
    let clt_stat =
        reference.map(|t| (n as f64 / (t_hat * (1.0 - t_hat))).sqrt() * (t_hat - t));
    Ok(TailEmpirical {
        t_hat,
        n_exceed,
        clt_stat,
    })
}

/// Exceedance-indicator correlations rho_k for k = 0..k_max, with the
/// plug-in normalization (P_k - T^2) / (T (1 - T)); rho_0 = 1.
pub fn indicator_correlations(path: &[f64], x_n: f64, k_max: usize) -> Result<Vec<f64>> {
    let n = path.len();
    if n <= k_max {
        return Err(Error::invalid("k_max", "path too short for the requested horizon"));
    }
    let ind: Vec<u8> = path.iter().map(|&x| u8::from(x > x_n)).collect();
    let total: usize = ind.iter().map(|&b| b as usize).sum();
    if total == 0 || total == n {
        return Err(Error::InsufficientData("degenerate exceedance indicators".into()));
    }
    let t_hat = total as f64 / n as f64;
    let denom = t_hat * (1.0 - t_hat);
    let mut out = vec![1.0];
    for k in 1..=k_max {
        let mut joint = 0usize;
        for i in 0..n - k {
            joint += (ind[i] & ind[i + k]) as usize;
        }
        let p_k = joint as f64 / (n - k) as f64;
        out.push((p_k - t_hat * t_hat) / denom);
    }
    Ok(out)
}

/// sum_{k in Z} rho_k under symmetry: rho_0 + 2 sum_{k >= 1} rho_k.
pub fn indicator_correlation_sum(rhos: &[f64]) -> f64 {
    rhos[0] + 2.0 * rhos[1..].iter().sum::<f64>()
}

/// Flat-truncation horizon ceil(n^{1/4}) for the correlation sum.
pub fn default_rho_horizon(n: usize) -> usize {
    (n as f64).powf(0.25).ceil() as usize
}

/// Fixed design matrix, row-major.
#[derive(Clone, Debug)]
pub struct DesignMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl DesignMatrix {
    pub fn new(data: Vec<f64>, rows: usize, cols: usize) -> Result<Self> {
        if rows * cols != data.len() || cols == 0 || rows == 0 {
            return Err(Error::invalid("design", "dimension mismatch"));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("design", "entries must be finite"));
        }
        Ok(DesignMatrix { data, rows, cols })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column rank via modified Gram-Schmidt; adequate for the small
    /// column counts used here.
    fn full_column_rank(&self) -> bool {
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(self.cols);
        for j in 0..self.cols {
            let mut col: Vec<f64> = (0..self.rows).map(|i| self.data[i * self.cols + j]).collect();
            let orig: f64 = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            for prev in &q {
                let dot: f64 = col.iter().zip(prev).map(|(a, b)| a * b).sum();
                for (c, p) in col.iter_mut().zip(prev) {
                    *c -= dot * p;
                }
            }
            let norm: f64 = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm <= 1e-10 * orig.max(1.0) {
                return false;
            }
            for c in col.iter_mut() {
                *c /= norm;
            }
            q.push(col);
        }
        true
    }
}

/// High quantile regression at exceedance level alpha_n.
///
/// Intercept-only (no design): the exact (1 - alpha_n) empirical
/// quantile, i.e. the order statistic at 1-based index
/// ceil(n (1 - alpha_n)) with the lower convention on flat stretches.
/// With a design: the check objective
/// sum phi_{1-alpha}(U_i - W_i' eta) is minimized exactly by a simplex
/// pass over the equivalent linear program.
pub fn high_quantile_fit(
    responses: &[f64],
    design: Option<&DesignMatrix>,
    alpha_n: f64,
) -> Result<Vec<f64>> {
    let n = responses.len();
    if !(alpha_n > 0.0 && alpha_n < 1.0) {
        return Err(Error::invalid("alpha_n", "exceedance level must lie in (0,1)"));
    }
    if (n as f64) * alpha_n < 1.0 {
        return Err(Error::InsufficientData(format!(
            "no tail data: n * alpha_n = {} < 1",
            n as f64 * alpha_n
        )));
    }
    match design {
        None => {
            let mut sorted = responses.to_vec();
            sorted.sort_by(f64::total_cmp);
            Ok(vec![empirical_quantile(&sorted, 1.0 - alpha_n)])
        }
        Some(w) => {
            if w.rows() != n {
                return Err(Error::invalid("design", "row count must match the responses"));
            }
            if !w.full_column_rank() {
                return Err(Error::invalid("design", "rank-deficient design matrix"));
            }
            solve_check_lp(&w.data, n, w.cols, responses, 1.0 - alpha_n)
        }
    }
}

/// Check objective sum_i phi_{1-alpha}(U_i - W_i' eta); the all-ones
/// design is implied when `design` is None.
pub fn check_objective(
    responses: &[f64],
    design: Option<&DesignMatrix>,
    alpha_n: f64,
    eta: &[f64],
) -> f64 {
    let tau = 1.0 - alpha_n;
    responses
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let fit: f64 = match design {
                None => eta[0],
                Some(w) => w.row(i).iter().zip(eta).map(|(a, b)| a * b).sum(),
            };
            let r = u - fit;
            if r >= 0.0 {
                tau * r
            } else {
                -(1.0 - tau) * r
            }
        })
        .sum()
}

/// CLT rate factor psi_n = sqrt(n alpha_n) f(q_{1-alpha_n}) / alpha_n
/// assembled from the law's closed-form density and quantile
/// (simulation mode; unavailable for ingested data).
pub fn quantile_rate_factor(law: &TailLaw, alpha_n: f64, n: usize) -> Result<f64> {
    if !(alpha_n > 0.0 && alpha_n < 1.0) {
        return Err(Error::invalid("alpha_n", "exceedance level must lie in (0,1)"));
    }
    let q = law.quantile(1.0 - alpha_n);
    let f = law.density(q);
    if !(f > 0.0) {
        return Err(Error::invalid("alpha_n", "law density vanishes at the target quantile"));
    }
    Ok((n as f64 * alpha_n).sqrt() * f / alpha_n)
}
