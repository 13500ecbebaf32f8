//! Simulation and verification toolkit for tail-dependent time series.
//!
//! The crate simulates regularly varying linear, stochastic-volatility
//! and max-linear processes together with coupled versions that share
//! all randomness except the time-zero innovation, Monte-Carlo-estimates
//! the tail stability measure from the coupled draws, fits
//! its decay against the process coefficients, computes tail statistics
//! (tail autocorrelation, tail empirical distribution, high quantile
//! regression), and checks everything against exact analytic oracles.
//!
//! Module map:
//! - [`heavy_tails`]: balanced regularly varying laws, samplers, moments;
//! - [`coefficients`]: truncated coefficient sequences with analytic
//!   tail-sum budgets;
//! - [`processes`]: path and coupled-pair simulation for the three
//!   process classes plus monotone transforms;
//! - [`tas`]: the stability-measure estimator, aggregation, sufficiency
//!   exponents and decay fits;
//! - [`tailstats`]: tail autocorrelation, tail empirical CLT, high
//!   quantile regression;
//! - [`verify`]: exact oracles and regular-variation diagnostics.

// parameter guards use the negated form `!(x > 0.0)` so NaN is rejected
// along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coefficients;
mod error;
pub mod heavy_tails;
pub mod processes;
mod rng;
mod simplex;
mod stable;
pub mod stats;
pub mod tas;
pub mod tailstats;
pub mod verify;

pub use error::{Error, Result};
pub use rng::{derive_seed, stream_rng};
