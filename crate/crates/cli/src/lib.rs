//! Experiment runner around the tail-stability toolkit: JSON configs in,
//! seeded pipelines, machine-readable reports and plot-ready CSVs out.

// parameter guards use the negated form `!(x > 0.0)` so NaN is rejected
// along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod pipeline;
pub mod report;

pub use config::{ExperimentConfig, Mode};
pub use pipeline::{execute_to_dir, run_experiment};
pub use report::{write_report, RunReport};
