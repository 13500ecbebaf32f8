//! Machine-readable run reports and their on-disk formats.
//!
//! `report.json` is the full structured report (schema versioned via
//! `report_version`). The CSV side files use '.' decimals, ',' field
//! separators, LF line endings and UTF-8, and are byte-identical across
//! reruns with the same config, seed and build:
//! - `theta.csv`: lag, abs_coeff, theta_hat, upper_conf, n_exceed_at_y
//! - `tailstats.csv`: k, tau_hat, ci_lo, ci_hi
//! - `plotdata/decay_loglog.csv`: lag, log_abs_coeff, log_theta_hat

use crate::config::ExperimentConfig;
use anyhow::Context;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// One verdict line; every enabled check of a run appears exactly once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl CheckLine {
    pub fn pass(name: &str, detail: String) -> Self {
        CheckLine {
            name: name.into(),
            status: CheckStatus::Pass,
            observed: None,
            expected: None,
            tolerance: None,
            detail,
        }
    }

    pub fn skipped(name: &str, detail: String) -> Self {
        CheckLine {
            name: name.into(),
            status: CheckStatus::Skipped,
            observed: None,
            expected: None,
            tolerance: None,
            detail,
        }
    }

    pub fn judged(name: &str, ok: bool, observed: f64, expected: f64, tolerance: f64, detail: String) -> Self {
        CheckLine {
            name: name.into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            observed: Some(observed),
            expected: Some(expected),
            tolerance: Some(tolerance),
            detail,
        }
    }
}

/// One row of the estimated stability curve. `se_at_argmax` is the
/// Wilson-implied standard error at the grid point attaining the sup;
/// rows from exact oracles carry `exact = true` and zero error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaRow {
    pub lag: usize,
    pub abs_coeff: f64,
    pub theta_hat: f64,
    pub upper_conf: f64,
    pub se_at_argmax: f64,
    pub n_exceed_at_y: usize,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFitReport {
    pub c_hat: f64,
    pub eta_hat: f64,
    pub r_squared: f64,
    pub lag_lo: usize,
    pub lag_hi: usize,
    pub excluded_lags: Vec<usize>,
    pub target_slope: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SufficiencyReport {
    pub vartheta: f64,
    pub case: String,
    /// sum |a_i|^vartheta over the stored truncation (exact).
    pub partial_sum: f64,
    /// Analytic bound on the neglected tail, when the family has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remainder_bound: Option<f64>,
    /// True when the full sum is certified finite.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaSumReport {
    pub q: f64,
    pub sum: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub remainder_bound: Option<f64>,
    /// m + 1 for finitely supported coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_dependence_bound: Option<f64>,
}

/// Exact-oracle comparison for one lag of the stability curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleThetaRow {
    pub lag: usize,
    pub theta_hat: f64,
    /// Exact sup over the same threshold grid.
    pub exact_sup: f64,
    pub delta: f64,
    /// Wilson-implied standard error at the estimate's argmax point.
    pub se: f64,
    pub within_3_se: bool,
}

/// Oracle outputs attached by the verify pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSection {
    pub theta: Vec<OracleThetaRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauRow {
    pub k: usize,
    pub tau_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailStatsReport {
    pub x_n: f64,
    pub n: usize,
    pub t_hat: f64,
    /// Fixed-threshold studentized statistic, present when a reference
    /// tail probability was available (simulation mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clt_stat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clt_reference: Option<f64>,
    pub alpha_n: f64,
    pub beta_hat: Vec<f64>,
    /// Rate factor from closed-form density and quantile; absent in
    /// data mode where no law is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_n: Option<f64>,
    pub rho_hat: Vec<f64>,
    pub rho_sum: f64,
    pub taus: Vec<TauRow>,
    /// True when the path was read from a CSV instead of simulated.
    pub data_mode: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub report_version: u32,
    pub tool_version: String,
    pub config: ExperimentConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<ThetaRow>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracles: Option<OracleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_fit: Option<DecayFitReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sufficiency: Option<SufficiencyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_sum: Option<ThetaSumReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_stats: Option<TailStatsReport>,
    /// Oracle comparisons and analytic checks, one line each.
    pub checks: Vec<CheckLine>,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }
}

/// Deterministic float formatting for CSV cells: plain decimal in the
/// human range, scientific outside it.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.is_finite() && (v.abs() >= 1e-4 && v.abs() < 1e16) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Writes report.json plus the CSV side files; returns the paths.
pub fn write_report(report: &RunReport, dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir.join("plotdata"))
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let mut written = Vec::new();

    let json_path = dir.join("report.json");
    let mut json = serde_json::to_string_pretty(report).context("serializing report")?;
    json.push('\n');
    write_file(&json_path, &json)?;
    written.push(json_path);

    let theta_path = dir.join("theta.csv");
    let mut theta = String::from("lag,abs_coeff,theta_hat,upper_conf,n_exceed_at_y\n");
    if let Some(rows) = &report.theta {
        for r in rows {
            let _ = writeln!(
                theta,
                "{},{},{},{},{}",
                r.lag,
                fmt_f64(r.abs_coeff),
                fmt_f64(r.theta_hat),
                fmt_f64(r.upper_conf),
                r.n_exceed_at_y
            );
        }
    }
    write_file(&theta_path, &theta)?;
    written.push(theta_path);

    let tail_path = dir.join("tailstats.csv");
    let mut tail = String::from("k,tau_hat,ci_lo,ci_hi\n");
    if let Some(ts) = &report.tail_stats {
        for t in &ts.taus {
            let _ = writeln!(
                tail,
                "{},{},{},{}",
                t.k,
                fmt_f64(t.tau_hat),
                fmt_f64(t.ci_lo),
                fmt_f64(t.ci_hi)
            );
        }
    }
    write_file(&tail_path, &tail)?;
    written.push(tail_path);

    let plot_path = dir.join("plotdata").join("decay_loglog.csv");
    let mut plot = String::from("lag,log_abs_coeff,log_theta_hat\n");
    if let Some(rows) = &report.theta {
        for r in rows {
            if r.theta_hat > 0.0 && r.abs_coeff > 0.0 {
                let _ = writeln!(
                    plot,
                    "{},{},{}",
                    r.lag,
                    fmt_f64(r.abs_coeff.ln()),
                    fmt_f64(r.theta_hat.ln())
                );
            }
        }
    }
    write_file(&plot_path, &plot)?;
    written.push(plot_path);

    Ok(written)
}

/// Writes coupled draws as CSV with a JSON sidecar recording the spec
/// and seed.
pub fn write_draws(
    draws: &tailstab_core::processes::CoupledDraws,
    spec: &tailstab_core::processes::ProcessSpec,
    dir: &Path,
) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv_path = dir.join("draws.csv");
    let mut out = String::from("replication,lag,x,x_star\n");
    for (idx, &lag) in draws.lags.iter().enumerate() {
        for (rep, &(x, xs)) in draws.pairs[idx].iter().enumerate() {
            let _ = writeln!(out, "{rep},{lag},{},{}", fmt_f64(x), fmt_f64(xs));
        }
    }
    write_file(&csv_path, &out)?;
    let meta_path = dir.join("draws_meta.json");
    let meta = serde_json::json!({
        "spec": spec,
        "seed": draws.seed,
        "reps": draws.reps,
        "lags": draws.lags,
    });
    write_file(&meta_path, &format!("{}\n", serde_json::to_string_pretty(&meta)?))?;
    Ok(vec![csv_path, meta_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_stable_and_parseable() {
        for v in [0.0, 0.05, -3.25, 1e-3, 9.999e-5, 1e-12, 2.5e17, f64::MAX] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, v, "{s}");
            assert_eq!(fmt_f64(v), s);
        }
    }
}
