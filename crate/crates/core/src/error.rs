use thiserror::Error;

use crate::eval::EvalError;
use crate::features::FeatureError;
use crate::hydrology::HydrologyError;
use crate::ingest::IngestError;
use crate::models::ModelError;
use crate::synth::SynthError;

/// Any failure raised by the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Hydrology(#[from] HydrologyError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
