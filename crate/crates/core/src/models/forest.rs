use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{fit_tree_on_rows, FeatureSubset, TreeModel, TreeParams};
use super::{check_training, labels_as, Classifier, Matrix, ModelError};
use crate::scalar::Scalar;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub bootstrap: bool,
    pub feature_subset: FeatureSubset,
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            bootstrap: true,
            feature_subset: FeatureSubset::Sqrt,
            max_depth: 6,
            min_leaf: 1,
        }
    }
}

/// Bagged CART trees; the score is the mean leaf value over trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel<F> {
    trees: Vec<TreeModel<F>>,
    tree_seeds: Vec<u64>,
    feature_subset_size: usize,
    n_features: usize,
}

impl<F: Scalar> ForestModel<F> {
    pub fn trees(&self) -> &[TreeModel<F>] {
        &self.trees
    }

    pub fn tree_seeds(&self) -> &[u64] {
        &self.tree_seeds
    }

    pub fn feature_subset_size(&self) -> usize {
        self.feature_subset_size
    }
}

impl<F: Scalar> Classifier<F> for ForestModel<F> {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn score_unchecked(&self, row: &[F]) -> F {
        let sum: F = self.trees.iter().map(|t| t.predict(row)).sum();
        sum / F::from_usize_lossy(self.trees.len())
    }
}

/// Trains `n_trees` trees in parallel; tree `i` uses a seed derived from
/// `(seed, i)` for both its bootstrap sample and its feature sampling.
pub fn fit_forest<F: Scalar>(
    x: &Matrix<F>,
    y: &[u8],
    params: &ForestParams,
    seed: u64,
) -> Result<ForestModel<F>, ModelError> {
    check_training(x, y)?;
    if params.n_trees == 0 {
        return Err(ModelError::InvalidParameter("n_trees must be >= 1".into()));
    }
    let target = labels_as::<F>(y);
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        feature_subset: params.feature_subset,
    };
    let n = x.n_rows();
    let tree_seeds: Vec<u64> = (0..params.n_trees as u64).map(|i| seed::derive_seed(seed, i)).collect();
    let trees = tree_seeds
        .par_iter()
        .map(|&s| {
            let mut rng = seed::rng(seed::derive_seed(s, u64::MAX));
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            fit_tree_on_rows(x, &target, &rows, &tree_params, s)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ForestModel {
        trees,
        tree_seeds,
        feature_subset_size: params.feature_subset.size(x.n_cols()),
        n_features: x.n_cols(),
    })
}
