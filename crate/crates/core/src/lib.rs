//! Multi-basin flood susceptibility toolkit.
//!
//! The pipeline runs from raw gauge records to ranked flood probabilities:
//!
//! * [`ingest`] parses stage readings, flood thresholds, daily precipitation,
//!   basin attributes and stage forecasts from fixed CSV schemas.
//! * [`hydrology`] derives labels: monthly flood occurrence from minor-threshold
//!   crossings and time-to-peak after precipitation events.
//! * [`features`] builds monthly summaries, the three experiment feature
//!   groups, the per-gauge train/validation/test split and min-max scaling.
//! * [`models`] holds the classifiers (CART, random forest, gradient boosted
//!   trees, multilayer perceptron trained with Adam) and grid tuning.
//! * [`eval`] computes precision-recall curves, average precision, the random
//!   baseline and the forecast-vs-observation monthly comparison.
//! * [`synth`] generates linear-reservoir basins with known ground truth.
//!
//! Numerical code in [`models`], [`eval`] and [`features::Normalizer`] is
//! generic over [`Scalar`] (`f32` or `f64`); the aliases below name the
//! common concrete instantiations.

// `!(x > 0.0)` is how parameter checks reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod eval;
pub mod features;
pub mod hydrology;
pub mod ingest;
pub mod models;
pub mod month;
pub mod scalar;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};
pub use month::YearMonth;
pub use scalar::Scalar;

/// Double-precision forest.
pub type Forest = models::ForestModel<f64>;
/// Single-precision forest.
pub type Forest32 = models::ForestModel<f32>;
/// Double-precision boosted ensemble.
pub type Gbdt = models::GbdtModel<f64>;
/// Single-precision boosted ensemble.
pub type Gbdt32 = models::GbdtModel<f32>;
/// Double-precision perceptron.
pub type Network = models::NetworkModel<f64>;
/// Single-precision perceptron.
pub type Network32 = models::NetworkModel<f32>;
/// Double-precision model of any kind.
pub type Model = models::Model<f64>;
/// Double-precision feature matrix.
pub type Matrix = models::Matrix<f64>;
/// Precision-recall curve over `f64` scores.
pub type Curve = eval::PrCurve<f64>;
/// Double-precision feature dataset.
pub type Dataset = features::Dataset<f64>;
