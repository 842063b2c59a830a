//! Monthly summaries, experiment feature groups, per-gauge splitting and
//! min-max scaling.

mod assemble;
mod dataset;
mod normalize;
mod split;
mod stats;

use std::path::PathBuf;

use thiserror::Error;

pub use assemble::{assemble_experiment, Experiment, Target};
pub use dataset::{class_balance, read_dataset_csv, write_dataset_csv, Dataset, Example, ExampleKey};
pub use normalize::{apply_normalizer, fit_normalizer, Normalizer};
pub use split::{split_by_gauge, Split, SplitAssignment, MIN_GAUGES};
pub use stats::{
    monthly_precip_stats, monthly_stats, window_stats, PrecipStats, StageStats, PRECIP_STAT_NAMES, STAGE_STAT_NAMES,
    WET_DAY_MM,
};

use crate::hydrology::HydrologyError;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("window has {coverage:.3} reading coverage, below the {cutoff} cutoff")]
    InsufficientCoverage { coverage: f64, cutoff: f64 },
    #[error("normalizer applied before fitting")]
    UnfittedNormalizer,
    #[error("normalizer already fitted")]
    AlreadyFitted,
    #[error("need at least {MIN_GAUGES} gauges to split, got {0}")]
    TooFewGauges(usize),
    #[error("expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gauge {gauge_id}: {month} has no prior month in the record")]
    NoPriorMonth { gauge_id: String, month: String },
    #[error("gauges disagree on attribute columns")]
    InconsistentFeatures,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error(transparent)]
    Hydrology(#[from] HydrologyError),
    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset file: {0}")]
    Format(String),
}
