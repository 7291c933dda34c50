//! Experiment pipelines for the `shadowvar` command-line tool.
//!
//! Each verb maps to one `cmd_*` function that validates its inputs, runs,
//! and writes plain CSV/JSON artifacts into an output directory.

pub mod commands;
pub mod config;
pub mod error;

pub use commands::{
    cmd_compare, cmd_exact, cmd_floor_fit, cmd_optimize, cmd_sweep, load_exact, Comparison, ExactMeta,
    FloorFitRequest, Manifest, SweepRequest, SweepRow,
};
pub use config::{FloorSpec, ModelSpec, Overrides, Precision, Resolved, RunConfig};
pub use error::{CliError, CliResult};
