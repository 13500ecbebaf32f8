//! Truncated coefficient sequences with declared tail-sum budgets.
//!
//! A sequence is stored as its truncation a_0..a_M together with the
//! family it came from. For the parametric families the truncation M is
//! the smallest one whose analytic bound on sum_{j>M} |a_j|^kappa stays
//! below the requested budget, so the neglected tail is auditable rather
//! than implicit.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Hard ceiling on the truncation length; budgets that would require
/// more terms are rejected rather than silently allocated.
pub const MAX_TRUNCATION: usize = 100_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CoefficientFamily {
    /// a_0 = c, a_j = c j^{-zeta} for j >= 1.
    PowerDecay { zeta: f64, c: f64 },
    /// a_j = r^j, 0 < r < 1.
    Geometric { r: f64 },
    /// Caller-supplied values, used as-is.
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoeffConfig", into = "CoeffConfig")]
pub struct CoefficientSeq {
    values: Vec<f64>,
    family: CoefficientFamily,
    kappa: f64,
    trunc_tol: f64,
}

/// Wire form of a coefficient sequence: constructor parameters, so the
/// truncation is re-derived (and re-validated) on parse.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CoeffConfig {
    PowerDecay {
        zeta: f64,
        c: f64,
        kappa: f64,
        trunc_tol: f64,
    },
    Geometric {
        r: f64,
        kappa: f64,
        trunc_tol: f64,
    },
    Explicit {
        values: Vec<f64>,
        #[serde(default)]
        trunc_tol: f64,
    },
}

impl TryFrom<CoeffConfig> for CoefficientSeq {
    type Error = Error;
    fn try_from(cfg: CoeffConfig) -> Result<CoefficientSeq> {
        match cfg {
            CoeffConfig::PowerDecay { zeta, c, kappa, trunc_tol } => {
                CoefficientSeq::power_decay(zeta, c, kappa, trunc_tol)
            }
            CoeffConfig::Geometric { r, kappa, trunc_tol } => {
                CoefficientSeq::geometric(r, kappa, trunc_tol)
            }
            CoeffConfig::Explicit { values, trunc_tol } => {
                CoefficientSeq::explicit(values, trunc_tol)
            }
        }
    }
}

impl From<CoefficientSeq> for CoeffConfig {
    fn from(seq: CoefficientSeq) -> CoeffConfig {
        match seq.family {
            CoefficientFamily::PowerDecay { zeta, c } => CoeffConfig::PowerDecay {
                zeta,
                c,
                kappa: seq.kappa,
                trunc_tol: seq.trunc_tol,
            },
            CoefficientFamily::Geometric { r } => CoeffConfig::Geometric {
                r,
                kappa: seq.kappa,
                trunc_tol: seq.trunc_tol,
            },
            CoefficientFamily::Explicit => CoeffConfig::Explicit {
                values: seq.values,
                trunc_tol: seq.trunc_tol,
            },
        }
    }
}

impl CoefficientSeq {
    /// Power-decay sequence truncated so that the integral-test bound
    /// |c|^kappa M^{1-zeta*kappa}/(zeta*kappa - 1) on the neglected
    /// sum_{j>M} |a_j|^kappa falls below `trunc_tol`.
    pub fn power_decay(zeta: f64, c: f64, kappa: f64, trunc_tol: f64) -> Result<Self> {
        check_kappa_tol(kappa, trunc_tol)?;
        if !(zeta > 0.0) {
            return Err(Error::invalid("zeta", "decay exponent must be positive"));
        }
        if c == 0.0 || !c.is_finite() {
            return Err(Error::invalid("c", "leading coefficient must be nonzero and finite"));
        }
        let zk = zeta * kappa;
        if zk <= 1.0 {
            return Err(Error::invalid(
                "zeta",
                format!("tail sum of |a_j|^kappa diverges: zeta*kappa = {zk} <= 1"),
            ));
        }
        let bound = |m: f64| c.abs().powf(kappa) * m.powf(1.0 - zk) / (zk - 1.0);
        let mut m = (c.abs().powf(kappa) / (trunc_tol * (zk - 1.0)))
            .powf(1.0 / (zk - 1.0))
            .ceil()
            .max(1.0) as usize;
        while m > 1 && bound((m - 1) as f64) < trunc_tol {
            m -= 1;
        }
        while bound(m as f64) >= trunc_tol {
            m += 1;
            if m > MAX_TRUNCATION {
                return Err(Error::invalid(
                    "trunc_tol",
                    format!("budget needs more than {MAX_TRUNCATION} coefficients"),
                ));
            }
        }
        if m > MAX_TRUNCATION {
            return Err(Error::invalid(
                "trunc_tol",
                format!("budget needs more than {MAX_TRUNCATION} coefficients"),
            ));
        }
        let mut values = Vec::with_capacity(m + 1);
        values.push(c);
        for j in 1..=m {
            values.push(c * (j as f64).powf(-zeta));
        }
        Ok(CoefficientSeq {
            values,
            family: CoefficientFamily::PowerDecay { zeta, c },
            kappa,
            trunc_tol,
        })
    }

    /// Geometric sequence a_j = r^j truncated so that the exact tail sum
    /// r^{kappa(M+1)} / (1 - r^kappa) falls below `trunc_tol`.
    pub fn geometric(r: f64, kappa: f64, trunc_tol: f64) -> Result<Self> {
        check_kappa_tol(kappa, trunc_tol)?;
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::invalid("r", format!("ratio must lie in (0,1), got {r}")));
        }
        let rk = r.powf(kappa);
        let bound = |m: f64| rk.powf(m + 1.0) / (1.0 - rk);
        let mut m = ((trunc_tol * (1.0 - rk)).ln() / rk.ln() - 1.0).ceil().max(0.0) as usize;
        while m > 0 && bound((m - 1) as f64) < trunc_tol {
            m -= 1;
        }
        while bound(m as f64) >= trunc_tol {
            m += 1;
            if m > MAX_TRUNCATION {
                return Err(Error::invalid(
                    "trunc_tol",
                    format!("budget needs more than {MAX_TRUNCATION} coefficients"),
                ));
            }
        }
        let values = (0..=m).map(|j| r.powi(j as i32)).collect();
        Ok(CoefficientSeq {
            values,
            family: CoefficientFamily::Geometric { r },
            kappa,
            trunc_tol,
        })
    }

    /// Explicit finite sequence, accepted as-is; the caller declares the
    /// neglected-tail budget (zero for a genuinely finite filter).
    pub fn explicit(values: Vec<f64>, trunc_tol: f64) -> Result<Self> {
        if values.is_empty() || values.iter().all(|&a| a == 0.0) {
            return Err(Error::invalid("values", "need at least one nonzero coefficient"));
        }
        if values.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("values", "coefficients must be finite"));
        }
        Ok(CoefficientSeq {
            values,
            family: CoefficientFamily::Explicit,
            kappa: 1.0,
            trunc_tol,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// a_i, zero beyond the truncation.
    pub fn coeff(&self, i: usize) -> f64 {
        self.values.get(i).copied().unwrap_or(0.0)
    }

    /// Truncation order M (so the sequence has M + 1 entries).
    pub fn truncation(&self) -> usize {
        self.values.len() - 1
    }

    pub fn family(&self) -> &CoefficientFamily {
        &self.family
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn trunc_tol(&self) -> f64 {
        self.trunc_tol
    }

    pub fn all_nonnegative(&self) -> bool {
        self.values.iter().all(|&a| a >= 0.0)
    }

    /// Index of the last nonzero coefficient; the process is
    /// m-dependent with this m.
    pub fn last_nonzero(&self) -> usize {
        self.values
            .iter()
            .rposition(|&a| a != 0.0)
            .expect("validated nonzero")
    }

    /// sum_j |a_j|^e over the stored truncation.
    pub fn abs_power_sum(&self, e: f64) -> f64 {
        self.values.iter().map(|a| a.abs().powf(e)).filter(|v| *v > 0.0).sum()
    }

    /// Analytic bound on sum_{j >= from} |a_j|^e beyond the truncation,
    /// when the family admits one. Explicit sequences have no tail, so
    /// the bound is 0 for `from > M`; within the truncation the exact
    /// partial sum is returned.
    pub fn tail_sum_bound(&self, e: f64, from: usize) -> Option<f64> {
        let inside: f64 = (from..=self.truncation())
            .map(|j| self.coeff(j).abs().powf(e))
            .filter(|v| *v > 0.0)
            .sum();
        let beyond = match self.family {
            CoefficientFamily::Explicit => 0.0,
            CoefficientFamily::PowerDecay { zeta, c } => {
                let ze = zeta * e;
                if ze <= 1.0 {
                    return None;
                }
                let m = self.truncation().max(from.saturating_sub(1)).max(1) as f64;
                c.abs().powf(e) * m.powf(1.0 - ze) / (ze - 1.0)
            }
            CoefficientFamily::Geometric { r } => {
                let re = r.powf(e);
                let start = self.truncation().max(from.saturating_sub(1)) + 1;
                re.powf(start as f64) / (1.0 - re)
            }
        };
        Some(inside + beyond)
    }
}

fn check_kappa_tol(kappa: f64, trunc_tol: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::invalid("kappa", format!("summability exponent must lie in (0,1], got {kappa}")));
    }
    if !(trunc_tol > 0.0) {
        return Err(Error::invalid("trunc_tol", "budget must be positive"));
    }
    Ok(())
}
