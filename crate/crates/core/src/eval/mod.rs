//! Ranking metrics and forecast comparison.

mod emit;
mod expected;
mod noaa;
mod pr;

use thiserror::Error;

pub use emit::{emit_pr_csv, emit_pr_svg, read_pr_csv, render_pr_svg, write_pr_csv, PlotSeries};
pub use expected::{bayes_optimal_ap, expected_ap};
pub use noaa::{noaa_monthly_eval, NoaaComparison, NOAA_REFERENCE_PRECISION, NOAA_REFERENCE_RECALL};
pub use pr::{pr_curve, random_baseline, recall_at_precision, BaselineCurve, PrCurve, PrPoint};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("labels contain no positives; precision-recall is undefined")]
    NoPositives,
    #[error("{scores} scores but {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("score at index {0} is not finite")]
    NonFiniteScore(usize),
    #[error("label at index {0} is not 0 or 1")]
    InvalidLabel(usize),
    #[error("probability at index {0} is outside [0, 1]")]
    InvalidProbability(usize),
    #[error("no labels")]
    Empty,
    #[error("forecasts and observations share no evaluable gauge-month")]
    NoOverlap,
    #[error(transparent)]
    Hydrology(#[from] crate::hydrology::HydrologyError),
    #[error("i/o error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed curve file: {reason}")]
    Format { path: String, reason: String },
}
