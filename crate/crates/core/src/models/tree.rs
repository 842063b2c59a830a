use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::{check_training, labels_as, Classifier, Matrix, ModelError};
use crate::scalar::Scalar;
use crate::seed;

/// Number of candidate features examined at each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSubset {
    All,
    Sqrt,
    Count(usize),
}

impl FeatureSubset {
    pub fn size(self, n_features: usize) -> usize {
        let k = match self {
            FeatureSubset::All => n_features,
            FeatureSubset::Sqrt => (n_features as f64).sqrt().round() as usize,
            FeatureSubset::Count(k) => k,
        };
        k.clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Maximum number of splits on any root-to-leaf path.
    pub max_depth: usize,
    pub min_leaf: usize,
    pub feature_subset: FeatureSubset,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: 6,
            min_leaf: 1,
            feature_subset: FeatureSubset::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Node<F> {
    Leaf {
        value: F,
    },
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: F,
        left: usize,
        right: usize,
    },
}

/// Regression tree stored as a node arena; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel<F> {
    nodes: Vec<Node<F>>,
    n_features: usize,
}

impl<F: Scalar> TreeModel<F> {
    pub fn nodes(&self) -> &[Node<F>] {
        &self.nodes
    }

    /// Index of the leaf node reached by `row`.
    pub fn leaf_index(&self, row: &[F]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }

    pub fn predict(&self, row: &[F]) -> F {
        match self.nodes[self.leaf_index(row)] {
            Node::Leaf { value } => value,
            Node::Split { .. } => unreachable!("leaf_index returns a leaf"),
        }
    }

    pub fn depth(&self) -> usize {
        fn go<F>(nodes: &[Node<F>], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }

    pub(crate) fn set_leaf_value(&mut self, node: usize, value: F) {
        if let Node::Leaf { value: v } = &mut self.nodes[node] {
            *v = value;
        }
    }
}

impl<F: Scalar> Classifier<F> for TreeModel<F> {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn score_unchecked(&self, row: &[F]) -> F {
        self.predict(row)
    }
}

struct Builder<'a, F> {
    x: &'a Matrix<F>,
    target: &'a [F],
    params: TreeParams,
    subset: usize,
    rng: seed::Rng,
    nodes: Vec<Node<F>>,
}

struct BestSplit<F> {
    gain: F,
    feature: usize,
    threshold: F,
}

impl<F: Scalar> Builder<'_, F> {
    fn grow(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let id = self.nodes.len();
        let n = F::from_usize_lossy(rows.len());
        let sum: F = rows.iter().map(|&r| self.target[r]).sum();
        self.nodes.push(Node::Leaf { value: sum / n });

        let pure = rows.iter().all(|&r| self.target[r] == self.target[rows[0]]);
        if depth >= self.params.max_depth || rows.len() < 2 * self.params.min_leaf || pure {
            return id;
        }
        let Some(best) = self.best_split(rows, sum) else {
            return id;
        };
        let (feature, threshold) = (best.feature, best.threshold);
        let mid = partition(rows, |&r| self.x.get(r, feature) <= threshold);
        let (l, r) = rows.split_at_mut(mid);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    fn candidate_features(&mut self) -> Vec<usize> {
        let d = self.x.n_cols();
        if self.subset >= d {
            return (0..d).collect();
        }
        let mut f = index::sample(&mut self.rng, d, self.subset).into_vec();
        f.sort_unstable();
        f
    }

    /// Variance-reduction split; gains compare strictly so the first
    /// feature/threshold wins ties.
    fn best_split(&mut self, rows: &[usize], sum: F) -> Option<BestSplit<F>> {
        let n = rows.len();
        let total = sum * sum / F::from_usize_lossy(n);
        let min_leaf = self.params.min_leaf;
        let mut best: Option<BestSplit<F>> = None;
        let mut order: Vec<(F, F)> = Vec::with_capacity(n);
        for feature in self.candidate_features() {
            order.clear();
            order.extend(rows.iter().map(|&r| (self.x.get(r, feature), self.target[r])));
            order.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite features"));
            let mut left_sum = F::zero();
            for i in 0..n - 1 {
                left_sum = left_sum + order[i].1;
                let n_left = i + 1;
                if n_left < min_leaf {
                    continue;
                }
                if n - n_left < min_leaf {
                    break;
                }
                let (lo, hi) = (order[i].0, order[i + 1].0);
                if lo >= hi {
                    continue;
                }
                let right_sum = sum - left_sum;
                let gain = left_sum * left_sum / F::from_usize_lossy(n_left)
                    + right_sum * right_sum / F::from_usize_lossy(n - n_left)
                    - total;
                if gain > F::zero() && best.as_ref().is_none_or(|b| gain > b.gain) {
                    best = Some(BestSplit {
                        gain,
                        feature,
                        threshold: midpoint(lo, hi),
                    });
                }
            }
        }
        best
    }
}

/// Midpoint that always separates `lo` from `hi`.
fn midpoint<F: Scalar>(lo: F, hi: F) -> F {
    let mid = lo + (hi - lo) / F::lit(2.0);
    if mid >= hi || mid < lo {
        lo
    } else {
        mid
    }
}

/// Stable partition; returns the number of elements satisfying `pred`.
fn partition(rows: &mut [usize], pred: impl Fn(&usize) -> bool) -> usize {
    let (yes, no): (Vec<usize>, Vec<usize>) = rows.iter().partition(|r| pred(r));
    let k = yes.len();
    rows[..k].copy_from_slice(&yes);
    rows[k..].copy_from_slice(&no);
    k
}

/// Fits a regression tree to `target` over the given rows (duplicates allowed,
/// as produced by bootstrap resampling).
pub fn fit_tree_on_rows<F: Scalar>(
    x: &Matrix<F>,
    target: &[F],
    rows: &[usize],
    params: &TreeParams,
    seed: u64,
) -> Result<TreeModel<F>, ModelError> {
    if rows.is_empty() || x.n_rows() == 0 {
        return Err(ModelError::EmptyDataset);
    }
    if target.len() != x.n_rows() {
        return Err(ModelError::DimensionMismatch {
            expected: x.n_rows(),
            found: target.len(),
        });
    }
    if params.min_leaf == 0 {
        return Err(ModelError::InvalidParameter("min_leaf must be >= 1".into()));
    }
    let mut b = Builder {
        x,
        target,
        params: *params,
        subset: params.feature_subset.size(x.n_cols()),
        rng: seed::rng(seed),
        nodes: Vec::new(),
    };
    let mut rows = rows.to_vec();
    b.grow(&mut rows, 0);
    Ok(TreeModel {
        nodes: b.nodes,
        n_features: x.n_cols(),
    })
}

/// CART classifier on 0/1 labels over all rows; leaves hold the positive fraction.
pub fn fit_tree<F: Scalar>(
    x: &Matrix<F>,
    y: &[u8],
    params: &TreeParams,
    seed: u64,
) -> Result<TreeModel<F>, ModelError> {
    check_training(x, y)?;
    let rows: Vec<usize> = (0..x.n_rows()).collect();
    fit_tree_on_rows(x, &labels_as::<F>(y), &rows, params, seed)
}
