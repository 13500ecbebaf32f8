//! Process simulation: linear (moving-average), stochastic-volatility
//! and max-linear (moving-maximum) paths, together with coupled versions
//! that share every innovation except the one at time zero.
//!
//! A coupled pair at lag i is (X_i, X_i*) where X_i* is recomputed with
//! the time-zero innovation replaced by an independent copy. For the
//! linear process X_i = Y_i + a_i e_0 and X_i* = Y_i + a_i e_0*, with
//! Y_i the lag-i sum excluding the time-zero term, computed once per
//! replication so the coupling is exact, not approximate. For the
//! stochastic-volatility process R_i = S_i X_i the time-zero element is
//! the pair (S_0, e_0): at lag zero both are replaced, at positive lags
//! only e_0 enters.
//!
//! Replication r draws everything from substream r of the master seed
//! in a fixed order: the innovation window by descending time, the
//! coupled time-zero innovation, then volatilities. Results are
//! identical under any parallel schedule, and because the window is
//! filled newest-first, enlarging the truncation only prepends older
//! innovations to the same stream, leaving all shared times unchanged.

use crate::coefficients::CoefficientSeq;
use crate::error::{Error, Result};
use crate::heavy_tails::{full_moment, TailLaw};
use crate::rng::stream_rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Linear,
    StochVol,
    MaxLinear,
}

/// Volatility multiplier law for the stochastic-volatility process.
/// `TwoPoint` is a bounded two-atom law (all moments finite); `Heavy`
/// wraps a regularly varying law for the heavy-volatility cases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VolatilityLaw {
    TwoPoint { lo: f64, hi: f64, p_hi: f64 },
    Heavy { law: TailLaw },
}

impl VolatilityLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            VolatilityLaw::TwoPoint { lo, hi, p_hi } => {
                if !lo.is_finite() || !hi.is_finite() || lo > hi {
                    return Err(Error::invalid("volatility", "two-point law needs finite lo <= hi"));
                }
                if !(0.0..=1.0).contains(&p_hi) {
                    return Err(Error::invalid("volatility", "p_hi must lie in [0,1]"));
                }
                Ok(())
            }
            VolatilityLaw::Heavy { .. } => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            VolatilityLaw::TwoPoint { lo, hi, p_hi } => {
                let u: f64 = rng.random();
                if u < p_hi {
                    hi
                } else {
                    lo
                }
            }
            VolatilityLaw::Heavy { law } => law.sample(rng),
        }
    }

    /// E[S_+^e] in closed form; `Err` when the wrapped family has none.
    pub fn moment_pos(&self, e: f64) -> Result<f64> {
        match *self {
            VolatilityLaw::TwoPoint { lo, hi, p_hi } => {
                Ok(p_hi * hi.max(0.0).powf(e) + (1.0 - p_hi) * lo.max(0.0).powf(e))
            }
            VolatilityLaw::Heavy { law } => Ok(law.balance() * full_moment(&law, e)?),
        }
    }

    /// E[S_-^e] = E[(-S)_+^e] in closed form.
    pub fn moment_neg(&self, e: f64) -> Result<f64> {
        match *self {
            VolatilityLaw::TwoPoint { lo, hi, p_hi } => {
                Ok(p_hi * (-hi).max(0.0).powf(e) + (1.0 - p_hi) * (-lo).max(0.0).powf(e))
            }
            VolatilityLaw::Heavy { law } => Ok((1.0 - law.balance()) * full_moment(&law, e)?),
        }
    }

    /// Largest finite moment order: +inf for the bounded law, the tail
    /// index for a heavy law.
    pub fn moment_order(&self) -> f64 {
        match *self {
            VolatilityLaw::TwoPoint { .. } => f64::INFINITY,
            VolatilityLaw::Heavy { law } => law.index(),
        }
    }
}

/// A non-decreasing transform applied pointwise to a process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MonotoneMap {
    Floor,
    Affine { slope: f64, intercept: f64 },
    /// Piecewise-linear interpolation through (xs, ys), clamped outside.
    Table { xs: Vec<f64>, ys: Vec<f64> },
}

impl MonotoneMap {
    pub fn validate(&self) -> Result<()> {
        match self {
            MonotoneMap::Floor => Ok(()),
            MonotoneMap::Affine { slope, .. } => {
                if *slope > 0.0 && slope.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("transform", format!("affine slope must be positive, got {slope}")))
                }
            }
            MonotoneMap::Table { xs, ys } => {
                if xs.len() != ys.len() || xs.len() < 2 {
                    return Err(Error::invalid("transform", "table needs at least two knots"));
                }
                if xs.windows(2).any(|w| !(w[0] < w[1])) {
                    return Err(Error::invalid("transform", "table x-knots must be strictly increasing"));
                }
                if ys.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Error::invalid("transform", "table y-knots must be non-decreasing"));
                }
                if xs.iter().chain(ys).any(|v| !v.is_finite()) {
                    return Err(Error::invalid("transform", "table knots must be finite"));
                }
                Ok(())
            }
        }
    }

    pub fn apply(&self, x: f64) -> f64 {
        match self {
            MonotoneMap::Floor => x.floor(),
            MonotoneMap::Affine { slope, intercept } => slope * x + intercept,
            MonotoneMap::Table { xs, ys } => {
                if x <= xs[0] {
                    return ys[0];
                }
                if x >= xs[xs.len() - 1] {
                    return ys[ys.len() - 1];
                }
                let hi = xs.partition_point(|&k| k < x);
                let lo = hi - 1;
                let t = (x - xs[lo]) / (xs[hi] - xs[lo]);
                ys[lo] + t * (ys[hi] - ys[lo])
            }
        }
    }
}

/// Full description of a simulated process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct ProcessSpec {
    kind: ProcessKind,
    innovation: TailLaw,
    coeffs: CoefficientSeq,
    volatility: Option<VolatilityLaw>,
    transform: Option<MonotoneMap>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawSpec {
    kind: ProcessKind,
    innovation: TailLaw,
    coefficients: CoefficientSeq,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    volatility: Option<VolatilityLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    transform: Option<MonotoneMap>,
}

impl TryFrom<RawSpec> for ProcessSpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<ProcessSpec> {
        let spec = match raw.kind {
            ProcessKind::Linear => ProcessSpec::linear(raw.innovation, raw.coefficients)?,
            ProcessKind::StochVol => {
                let vol = raw.volatility.ok_or_else(|| {
                    Error::invalid("volatility", "stoch_vol process requires a volatility law")
                })?;
                ProcessSpec::stoch_vol(raw.innovation, raw.coefficients, vol)?
            }
            ProcessKind::MaxLinear => ProcessSpec::max_linear(raw.innovation, raw.coefficients)?,
        };
        if raw.kind != ProcessKind::StochVol && raw.volatility.is_some() {
            return Err(Error::invalid("volatility", "only the stoch_vol process takes a volatility law"));
        }
        match raw.transform {
            Some(map) => spec.with_transform(map),
            None => Ok(spec),
        }
    }
}

impl From<ProcessSpec> for RawSpec {
    fn from(spec: ProcessSpec) -> RawSpec {
        RawSpec {
            kind: spec.kind,
            innovation: spec.innovation,
            coefficients: spec.coeffs,
            volatility: spec.volatility,
            transform: spec.transform,
        }
    }
}

impl ProcessSpec {
    pub fn linear(innovation: TailLaw, coeffs: CoefficientSeq) -> Result<Self> {
        Ok(ProcessSpec {
            kind: ProcessKind::Linear,
            innovation,
            coeffs,
            volatility: None,
            transform: None,
        })
    }

    pub fn stoch_vol(
        innovation: TailLaw,
        coeffs: CoefficientSeq,
        volatility: VolatilityLaw,
    ) -> Result<Self> {
        volatility.validate()?;
        Ok(ProcessSpec {
            kind: ProcessKind::StochVol,
            innovation,
            coeffs,
            volatility: Some(volatility),
            transform: None,
        })
    }

    pub fn max_linear(innovation: TailLaw, coeffs: CoefficientSeq) -> Result<Self> {
        if !coeffs.all_nonnegative() {
            return Err(Error::invalid("coefficients", "max-linear coefficients must be non-negative"));
        }
        if !innovation.is_one_sided() {
            return Err(Error::invalid(
                "innovation",
                "max-linear innovations must come from a one-sided law",
            ));
        }
        Ok(ProcessSpec {
            kind: ProcessKind::MaxLinear,
            innovation,
            coeffs,
            volatility: None,
            transform: None,
        })
    }

    /// Attaches a monotone transform; the simulated process becomes
    /// K(X_i) pointwise.
    pub fn with_transform(mut self, map: MonotoneMap) -> Result<Self> {
        map.validate()?;
        self.transform = Some(map);
        Ok(self)
    }

    pub fn kind(&self) -> ProcessKind {
        self.kind
    }
    pub fn innovation(&self) -> &TailLaw {
        &self.innovation
    }
    pub fn coeffs(&self) -> &CoefficientSeq {
        &self.coeffs
    }
    pub fn volatility(&self) -> Option<&VolatilityLaw> {
        self.volatility.as_ref()
    }
    pub fn transform(&self) -> Option<&MonotoneMap> {
        self.transform.as_ref()
    }
}

/// Paired realizations (x, x_star) per lag, sharing all randomness
/// except the time-zero innovation element.
#[derive(Clone, Debug)]
pub struct CoupledDraws {
    pub lags: Vec<usize>,
    /// pairs[l][r] is the replication-r pair at lags[l].
    pub pairs: Vec<Vec<(f64, f64)>>,
    pub reps: usize,
    pub seed: u64,
    /// Logged time-zero innovations, one per replication.
    pub eps0: Vec<f64>,
    pub eps0_star: Vec<f64>,
    /// Logged time-zero volatilities, present for stoch-vol draws.
    pub vol0: Option<Vec<f64>>,
    pub vol0_star: Option<Vec<f64>>,
}

impl CoupledDraws {
    pub fn pairs_at(&self, lag: usize) -> Option<&[(f64, f64)]> {
        self.lags
            .iter()
            .position(|&l| l == lag)
            .map(|i| self.pairs[i].as_slice())
    }
}

fn check_lags(lags: &[usize], max: usize) -> Result<()> {
    if lags.is_empty() {
        return Err(Error::invalid("lags", "need at least one lag"));
    }
    if lags.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("lags", "lags must be strictly increasing"));
    }
    for &lag in lags {
        if lag > max {
            return Err(Error::LagBeyondTruncation { lag, max });
        }
    }
    Ok(())
}

fn check_reps(reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(Error::invalid("reps", "need at least one replication"));
    }
    Ok(())
}

struct RepOut {
    per_lag: Vec<(f64, f64)>,
    eps0: f64,
    eps0_star: f64,
    vols: Option<(f64, f64)>,
}

fn assemble(lags: &[usize], reps: usize, seed: u64, outs: Vec<RepOut>, vol: bool) -> CoupledDraws {
    let mut pairs = vec![Vec::with_capacity(reps); lags.len()];
    let mut eps0 = Vec::with_capacity(reps);
    let mut eps0_star = Vec::with_capacity(reps);
    let mut vol0 = vol.then(|| Vec::with_capacity(reps));
    let mut vol0_star = vol.then(|| Vec::with_capacity(reps));
    for out in outs {
        for (l, pair) in out.per_lag.into_iter().enumerate() {
            pairs[l].push(pair);
        }
        eps0.push(out.eps0);
        eps0_star.push(out.eps0_star);
        if let (Some(v0), Some(v0s)) = (vol0.as_mut(), vol0_star.as_mut()) {
            let (a, b) = out.vols.expect("volatility logged");
            v0.push(a);
            v0s.push(b);
        }
    }
    CoupledDraws {
        lags: lags.to_vec(),
        pairs,
        reps,
        seed,
        eps0,
        eps0_star,
        vol0,
        vol0_star,
    }
}

/// Coupled pairs for the linear process: (Y_i + a_i e_0, Y_i + a_i e_0*)
/// with Y_i shared within the replication.
pub fn simulate_linear_coupled(
    spec: &ProcessSpec,
    lags: &[usize],
    reps: usize,
    seed: u64,
) -> Result<CoupledDraws> {
    if spec.kind() != ProcessKind::Linear {
        return Err(Error::invalid("spec", "simulate_linear_coupled needs a linear process"));
    }
    let a = spec.coeffs().values();
    let m = spec.coeffs().truncation();
    check_lags(lags, m)?;
    check_reps(reps)?;
    let law = *spec.innovation();
    let max_lag = *lags.last().unwrap();
    let outs: Vec<RepOut> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r);
            // window w[t + m] = innovation at time t, t = -m ..= max_lag
            let mut w = vec![0.0f64; m + max_lag + 1];
            for slot in w.iter_mut().rev() {
                *slot = law.sample(&mut rng);
            }
            let eps0 = w[m];
            let eps0_star = law.sample(&mut rng);
            let per_lag = lags
                .iter()
                .map(|&i| {
                    let mut y = 0.0;
                    for (j, &aj) in a.iter().enumerate() {
                        if j != i {
                            y += aj * w[i + m - j];
                        }
                    }
                    (y + a[i] * eps0, y + a[i] * eps0_star)
                })
                .collect();
            RepOut {
                per_lag,
                eps0,
                eps0_star,
                vols: None,
            }
        })
        .collect();
    Ok(assemble(lags, reps, seed, outs, false))
}

/// Coupled pairs for R_i = S_i X_i. The time-zero element is (S_0, e_0):
/// both are replaced at lag 0, only e_0 at lags >= 1 (S_0 does not enter
/// R_i there).
pub fn simulate_stoch_vol_coupled(
    spec: &ProcessSpec,
    lags: &[usize],
    reps: usize,
    seed: u64,
) -> Result<CoupledDraws> {
    if spec.kind() != ProcessKind::StochVol {
        return Err(Error::invalid("spec", "simulate_stoch_vol_coupled needs a stoch_vol process"));
    }
    let a = spec.coeffs().values();
    let m = spec.coeffs().truncation();
    check_lags(lags, m)?;
    check_reps(reps)?;
    let law = *spec.innovation();
    let vol = *spec.volatility().expect("validated stoch_vol");
    let max_lag = *lags.last().unwrap();
    let outs: Vec<RepOut> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r);
            let mut w = vec![0.0f64; m + max_lag + 1];
            for slot in w.iter_mut().rev() {
                *slot = law.sample(&mut rng);
            }
            let eps0 = w[m];
            let eps0_star = law.sample(&mut rng);
            let s: Vec<f64> = (0..max_lag + 1).map(|_| vol.sample(&mut rng)).collect();
            let s0_star = vol.sample(&mut rng);
            let per_lag = lags
                .iter()
                .map(|&i| {
                    let mut y = 0.0;
                    for (j, &aj) in a.iter().enumerate() {
                        if j != i {
                            y += aj * w[i + m - j];
                        }
                    }
                    if i == 0 {
                        (s[0] * (y + a[0] * eps0), s0_star * (y + a[0] * eps0_star))
                    } else {
                        (s[i] * (y + a[i] * eps0), s[i] * (y + a[i] * eps0_star))
                    }
                })
                .collect();
            RepOut {
                per_lag,
                eps0,
                eps0_star,
                vols: Some((s[0], s0_star)),
            }
        })
        .collect();
    Ok(assemble(lags, reps, seed, outs, true))
}

/// Coupled pairs for the moving-maximum process:
/// (max(Y_i, a_i e_0), max(Y_i, a_i e_0*)) with Y_i the lag-i maximum
/// excluding the time-zero term.
pub fn simulate_max_linear_coupled(
    spec: &ProcessSpec,
    lags: &[usize],
    reps: usize,
    seed: u64,
) -> Result<CoupledDraws> {
    if spec.kind() != ProcessKind::MaxLinear {
        return Err(Error::invalid("spec", "simulate_max_linear_coupled needs a max_linear process"));
    }
    let a = spec.coeffs().values();
    let m = spec.coeffs().truncation();
    check_lags(lags, m)?;
    check_reps(reps)?;
    let law = *spec.innovation();
    let max_lag = *lags.last().unwrap();
    let outs: Vec<RepOut> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r);
            let mut w = vec![0.0f64; m + max_lag + 1];
            for slot in w.iter_mut().rev() {
                *slot = law.sample(&mut rng);
            }
            let eps0 = w[m];
            let eps0_star = law.sample(&mut rng);
            let per_lag = lags
                .iter()
                .map(|&i| {
                    // all terms are non-negative, so 0 is a safe identity
                    let mut y = 0.0f64;
                    for (j, &aj) in a.iter().enumerate() {
                        if j != i {
                            y = y.max(aj * w[i + m - j]);
                        }
                    }
                    ((a[i] * eps0).max(y), (a[i] * eps0_star).max(y))
                })
                .collect();
            RepOut {
                per_lag,
                eps0,
                eps0_star,
                vols: None,
            }
        })
        .collect();
    Ok(assemble(lags, reps, seed, outs, false))
}

/// Dispatches on the process kind and applies the attached transform.
pub fn simulate_coupled(
    spec: &ProcessSpec,
    lags: &[usize],
    reps: usize,
    seed: u64,
) -> Result<CoupledDraws> {
    let draws = match spec.kind() {
        ProcessKind::Linear => simulate_linear_coupled(spec, lags, reps, seed)?,
        ProcessKind::StochVol => simulate_stoch_vol_coupled(spec, lags, reps, seed)?,
        ProcessKind::MaxLinear => simulate_max_linear_coupled(spec, lags, reps, seed)?,
    };
    match spec.transform() {
        Some(map) => apply_monotone_draws(map, draws),
        None => Ok(draws),
    }
}

/// A stationary path of length n. Innovations come from stream 0 of the
/// seed (times -M .. n-1), volatilities from stream 1, so the innovation
/// sample is recoverable by drawing the same stream again.
pub fn simulate_path(spec: &ProcessSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("n", "path length must be positive"));
    }
    let a = spec.coeffs().values();
    let m = spec.coeffs().truncation();
    let eps = spec.innovation().sample_iid(n + m, seed, 0);
    let mut path: Vec<f64> = match spec.kind() {
        ProcessKind::Linear | ProcessKind::StochVol => (0..n)
            .map(|i| {
                let mut x = 0.0;
                for (j, &aj) in a.iter().enumerate() {
                    x += aj * eps[i + m - j];
                }
                x
            })
            .collect(),
        ProcessKind::MaxLinear => (0..n)
            .map(|i| {
                let mut x = 0.0f64;
                for (j, &aj) in a.iter().enumerate() {
                    x = x.max(aj * eps[i + m - j]);
                }
                x
            })
            .collect(),
    };
    if spec.kind() == ProcessKind::StochVol {
        let vol = spec.volatility().expect("validated stoch_vol");
        let mut rng = stream_rng(seed, 1);
        for x in path.iter_mut() {
            *x *= vol.sample(&mut rng);
        }
    }
    if let Some(map) = spec.transform() {
        map.validate()?;
        for x in path.iter_mut() {
            *x = map.apply(*x);
        }
    }
    Ok(path)
}

/// n independent draws from the marginal law of X_0 (or R_0), one
/// substream per draw. Unlike a path, consecutive values share nothing.
pub fn simulate_marginal_iid(spec: &ProcessSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("n", "sample size must be positive"));
    }
    let a = spec.coeffs().values();
    let m = spec.coeffs().truncation();
    let law = *spec.innovation();
    let kind = spec.kind();
    let vol = spec.volatility().copied();
    let transform = spec.transform().cloned();
    let out: Vec<f64> = (0..n as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r);
            let mut w = vec![0.0f64; m + 1];
            for slot in w.iter_mut().rev() {
                *slot = law.sample(&mut rng);
            }
            let mut x = match kind {
                ProcessKind::MaxLinear => {
                    let mut v = 0.0f64;
                    for (j, &aj) in a.iter().enumerate() {
                        v = v.max(aj * w[m - j]);
                    }
                    v
                }
                _ => {
                    let mut v = 0.0;
                    for (j, &aj) in a.iter().enumerate() {
                        v += aj * w[m - j];
                    }
                    v
                }
            };
            if kind == ProcessKind::StochVol {
                x *= vol.expect("validated stoch_vol").sample(&mut rng);
            }
            match &transform {
                Some(map) => map.apply(x),
                None => x,
            }
        })
        .collect();
    Ok(out)
}

/// Applies a monotone transform elementwise to a path.
pub fn apply_monotone_path(map: &MonotoneMap, path: &[f64]) -> Result<Vec<f64>> {
    map.validate()?;
    Ok(path.iter().map(|&x| map.apply(x)).collect())
}

/// Applies a monotone transform to both members of every coupled pair.
pub fn apply_monotone_draws(map: &MonotoneMap, draws: CoupledDraws) -> Result<CoupledDraws> {
    map.validate()?;
    let mut draws = draws;
    for lane in draws.pairs.iter_mut() {
        for pair in lane.iter_mut() {
            *pair = (map.apply(pair.0), map.apply(pair.1));
        }
    }
    Ok(draws)
}
