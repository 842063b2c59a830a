//! Supervised classifiers behind one scoring interface.
//!
//! Every model maps a feature vector to a probability-like score in `[0, 1]`.
//! Training is deterministic given a seed, independent of thread count.

mod adam;
mod forest;
mod gbdt;
mod matrix;
mod mlp;
mod persist;
mod tree;
mod tune;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use adam::{AdamConfig, AdamState};
pub use forest::{fit_forest, ForestModel, ForestParams};
pub use gbdt::{fit_gbdt, logistic_loss, GbdtModel, GbdtParams, LEAF_CLIP};
pub use matrix::Matrix;
pub use mlp::{fit_mlp, MlpParams, NetworkModel};
pub use persist::{load_model, model_from_json, model_to_json, save_model, FORMAT_NAME, FORMAT_VERSION};
pub use tree::{fit_tree, fit_tree_on_rows, FeatureSubset, Node, TreeModel, TreeParams};
pub use tune::{default_grid, fit_model, tune, HyperParams, ModelFamily, TuneResult};

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training set is empty")]
    EmptyDataset,
    #[error("expected {expected} features, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("labels contain a single class; log-odds base score is unbounded")]
    SingleClassLabels,
    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },
    #[error("hyper-parameter grid is empty")]
    EmptyGrid,
    #[error("invalid hyper-parameter: {0}")]
    InvalidParameter(String),
    #[error("labels must be 0 or 1")]
    InvalidLabel,
    #[error(transparent)]
    Eval(#[from] crate::eval::EvalError),
    #[error("model file {path}: {reason}")]
    Persist { path: String, reason: String },
}

/// Common scoring interface.
pub trait Classifier<F: Scalar> {
    fn n_features(&self) -> usize;

    /// Scores a row whose length is already known to match.
    fn score_unchecked(&self, row: &[F]) -> F;

    fn score(&self, row: &[F]) -> Result<F, ModelError> {
        if row.len() != self.n_features() {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_features(),
                found: row.len(),
            });
        }
        Ok(self.score_unchecked(row))
    }

    fn score_matrix(&self, x: &Matrix<F>) -> Result<Vec<F>, ModelError> {
        if x.n_cols() != self.n_features() {
            return Err(ModelError::DimensionMismatch {
                expected: self.n_features(),
                found: x.n_cols(),
            });
        }
        Ok(x.rows().map(|r| self.score_unchecked(r)).collect())
    }
}

/// Any trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(deserialize = "F: Scalar"))]
pub enum Model<F> {
    Tree(TreeModel<F>),
    Forest(ForestModel<F>),
    Gbdt(GbdtModel<F>),
    Mlp(NetworkModel<F>),
}

impl<F: Scalar> Classifier<F> for Model<F> {
    fn n_features(&self) -> usize {
        match self {
            Model::Tree(m) => m.n_features(),
            Model::Forest(m) => m.n_features(),
            Model::Gbdt(m) => m.n_features(),
            Model::Mlp(m) => m.n_features(),
        }
    }

    fn score_unchecked(&self, row: &[F]) -> F {
        match self {
            Model::Tree(m) => m.score_unchecked(row),
            Model::Forest(m) => m.score_unchecked(row),
            Model::Gbdt(m) => m.score_unchecked(row),
            Model::Mlp(m) => m.score_unchecked(row),
        }
    }
}

pub(crate) fn check_training<F: Scalar>(x: &Matrix<F>, y: &[u8]) -> Result<(), ModelError> {
    if x.n_rows() == 0 {
        return Err(ModelError::EmptyDataset);
    }
    if y.len() != x.n_rows() {
        return Err(ModelError::DimensionMismatch {
            expected: x.n_rows(),
            found: y.len(),
        });
    }
    if y.iter().any(|&l| l > 1) {
        return Err(ModelError::InvalidLabel);
    }
    Ok(())
}

pub(crate) fn labels_as<F: Scalar>(y: &[u8]) -> Vec<F> {
    y.iter().map(|&l| if l == 1 { F::one() } else { F::zero() }).collect()
}
