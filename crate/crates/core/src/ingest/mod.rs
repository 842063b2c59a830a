//! Parsing and validation of the input datasets.
//!
//! All files share one dialect: comma separated, `\n` line endings, UTF-8,
//! a mandatory header row and no quoting. Timestamps are ISO-8601 UTC with a
//! `Z` suffix at second precision; dates are `YYYY-MM-DD`. Stage is in feet,
//! precipitation in millimetres.

mod join;
mod parse;
mod types;
mod write;

use std::path::PathBuf;

use thiserror::Error;

pub use join::{join_gauges, CoverageReport, GaugeRecord, JoinResult, MissingComponent};
pub use parse::{
    parse_attributes_csv, parse_forecast_csv, parse_precip_csv, parse_stage_csv, parse_thresholds_csv,
    read_attributes_csv, read_forecast_csv, read_precip_csv, read_stage_csv, read_thresholds_csv, ParseReport, Parsed,
    Strictness,
};
pub use types::{
    format_timestamp, parse_date, parse_timestamp, BasinAttributes, DailyPrecip, DailyTotal, FloodThresholds,
    ForecastRecord, Gap, Reading, StageSeries, CADENCE_SECONDS, MAX_FORECAST_HORIZON_HOURS, REQUIRED_ATTRIBUTES,
};
pub use write::{write_attributes_csv, write_forecast_csv, write_precip_csv, write_stage_csv, write_thresholds_csv};

pub const STAGE_HEADER: &str = "gauge_id,timestamp,stage_ft";
pub const THRESHOLDS_HEADER: &str = "gauge_id,minor_ft,moderate_ft,major_ft";
pub const PRECIP_HEADER: &str = "gauge_id,date,precip_mm";
pub const FORECAST_HEADER: &str = "gauge_id,issued_at,valid_at,forecast_stage_ft";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(String),
    #[error("missing or wrong header: expected `{expected}`, found `{found}`")]
    MissingHeader { expected: String, found: String },
    #[error("line {line}: timestamps for gauge {gauge_id} are not strictly increasing")]
    NonMonotonicTimestamp { gauge_id: String, line: u64 },
    #[error("line {line}: {reason}")]
    UnparseableRow { line: u64, reason: String },
    #[error("gauge {gauge_id}: thresholds must satisfy minor <= moderate <= major")]
    ThresholdOrderViolation { gauge_id: String },
    #[error("gauge {gauge_id}: minor threshold must be positive")]
    NonPositiveMinor { gauge_id: String },
    #[error("line {line}: forecast for gauge {gauge_id} is more than 72 h ahead of issue time")]
    HorizonExceeded { gauge_id: String, line: u64 },
    #[error("line {line}: gauge {gauge_id} has no value in column `{column}`")]
    MissingAttribute {
        gauge_id: String,
        column: String,
        line: u64,
    },
    #[error("required column `{column}` is absent")]
    MissingColumn { column: String },
    #[error("duplicate column `{column}`")]
    DuplicateColumn { column: String },
    #[error("gauge {gauge_id} appears more than once")]
    DuplicateGauge { gauge_id: String },
    #[error("gauge {gauge_id}: `{column}` value {value} out of range")]
    OutOfRange {
        gauge_id: String,
        column: String,
        value: f64,
    },
    #[error("records disagree on attribute columns")]
    InconsistentColumns,
    #[error("no gauge has stage, thresholds, precipitation and attributes")]
    EmptyJoin,
}

impl IngestError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
