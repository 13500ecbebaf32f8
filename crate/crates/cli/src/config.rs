//! Experiment configuration: one JSON document describing the process,
//! the Monte-Carlo budget, thresholds, and which pipeline to run.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use std::path::Path;
use tailstab_core::processes::ProcessSpec;
use tailstab_core::tailstats::BootstrapPolicy;
use tailstab_core::tas::GridPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    TasCurve,
    TailStats,
    Verify,
    Full,
}

/// Settings for the tail-statistics pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TailStatsConfig {
    /// Simulated path length (ignored when `data_csv` is set).
    pub n: usize,
    /// Threshold quantile for tail autocorrelation and the tail
    /// empirical distribution.
    pub x_quantile: f64,
    pub k_max: usize,
    /// Exceedance level for the high quantile regression.
    pub alpha_n: f64,
    pub bootstrap: BootstrapPolicy,
    /// Single-column CSV of observations; switches to data mode.
    pub data_csv: Option<String>,
}

impl Default for TailStatsConfig {
    fn default() -> Self {
        TailStatsConfig {
            n: 100_000,
            x_quantile: 0.99,
            k_max: 10,
            alpha_n: 0.05,
            bootstrap: BootstrapPolicy::default(),
            data_csv: None,
        }
    }
}

/// Settings for the oracle-comparison pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    /// Path length for tail-ratio and index diagnostics.
    pub path_len: usize,
    /// Quantile of |innovation| at which tail ratios are evaluated.
    pub ratio_quantile: f64,
    /// Relative tolerance for tail-ratio checks.
    pub ratio_tol: f64,
    /// Volatility tail case to verify: 1, 2 or 3.
    pub vol_case: u8,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            path_len: 10_000_000,
            ratio_quantile: 0.9999,
            ratio_tol: 0.10,
            vol_case: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub process: ProcessSpec,
    pub reps: usize,
    pub lags: Vec<usize>,
    pub y_quantile: f64,
    /// Stability order q for the cumulative sum.
    pub q: f64,
    pub seed: u64,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<String>,
    #[serde(default)]
    pub grid: GridPolicy,
    /// Slack for the sufficiency-exponent table.
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Target decay slope for indices <= 1 (must be below the tail
    /// index); ignored when the index exceeds 1, where the target is 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay_target_eta: Option<f64>,
    #[serde(default)]
    pub export_draws: bool,
    #[serde(default)]
    pub tail_stats: TailStatsConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

fn default_epsilon() -> f64 {
    0.01
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: ExperimentConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.y_quantile > 0.0 && self.y_quantile < 1.0) {
            bail!("field `y_quantile`: must lie strictly inside (0,1), got {}", self.y_quantile);
        }
        if self.reps < 1000 {
            bail!("field `reps`: need at least 1000 replications, got {}", self.reps);
        }
        if self.lags.is_empty() {
            bail!("field `lags`: need at least one lag");
        }
        if self.lags.windows(2).any(|w| w[0] >= w[1]) {
            bail!("field `lags`: lags must be strictly increasing");
        }
        let max = self.process.coeffs().truncation();
        if let Some(&bad) = self.lags.iter().find(|&&l| l > max) {
            bail!("field `lags`: lag {bad} exceeds the coefficient truncation M = {max}");
        }
        if !(self.q > 0.0) {
            bail!("field `q`: stability order must be positive, got {}", self.q);
        }
        if !(self.epsilon >= 0.0) {
            bail!("field `epsilon`: slack must be non-negative");
        }
        if let Some(eta) = self.decay_target_eta {
            if !(eta > 0.0 && eta < self.process.innovation().index()) {
                bail!(
                    "field `decay_target_eta`: must lie in (0, nu) = (0, {}), got {eta}",
                    self.process.innovation().index()
                );
            }
        }
        let ts = &self.tail_stats;
        if !(ts.x_quantile > 0.0 && ts.x_quantile < 1.0) {
            bail!("field `tail_stats.x_quantile`: must lie in (0,1), got {}", ts.x_quantile);
        }
        if !(ts.alpha_n > 0.0 && ts.alpha_n < 1.0) {
            bail!("field `tail_stats.alpha_n`: must lie in (0,1), got {}", ts.alpha_n);
        }
        if ts.n == 0 && ts.data_csv.is_none() {
            bail!("field `tail_stats.n`: path length must be positive");
        }
        let v = &self.verify;
        if !(v.ratio_quantile > 0.0 && v.ratio_quantile < 1.0) {
            bail!("field `verify.ratio_quantile`: must lie in (0,1)");
        }
        if !(1..=3).contains(&v.vol_case) {
            bail!("field `verify.vol_case`: must be 1, 2 or 3, got {}", v.vol_case);
        }
        Ok(())
    }
}
