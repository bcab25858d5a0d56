//! Experiment harness for `smooth-moments`: JSON-configured sweeps over
//! `(x, y, ρ)`, CSV / JSONL persistence and plots.

pub mod config;
pub mod error;
pub mod number;
pub mod plot;
pub mod rows;
pub mod sweep;

pub use config::{ArcSplitSpec, ExperimentConfig, Format, GridPolicy, QRule, Smoothness};
pub use error::{HarnessError, Result};
pub use rows::{read_rows, ArcRow, ResultRow, SkeletonRow, SCHEMA_VERSION};
pub use sweep::{compute, run_config, write_outputs, SweepOutput, THREADS_ENV};
