//! Orchestration behind the `floodcast` binary.
//!
//! Each subcommand has a `cmd_*` function taking fully resolved settings, so
//! the same code path runs from the command line and from tests. Settings
//! come from [`config::ConfigLayer`]s: defaults, an optional TOML file, then
//! flags.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;

mod commands;

pub use commands::{
    cmd_eval_noaa, cmd_experiment, cmd_featurize, cmd_ingest, cmd_report, cmd_synth, with_threads, FeaturizeSummary,
    IngestSummary, NoaaReport, SynthSummary,
};
pub use config::{ConfigLayer, ExperimentConfig, FeaturizeSettings, InputSettings, SynthSettings};
pub use error::{CliError, CliResult};
pub use pipeline::{run_experiment, ExperimentReport, ExperimentRun};
