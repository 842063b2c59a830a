use serde::{Deserialize, Serialize};

use super::tree::{fit_tree_on_rows, FeatureSubset, TreeModel, TreeParams};
use super::{check_training, Classifier, Matrix, ModelError};
use crate::scalar::{exact_sum, Scalar};
use crate::seed;

/// Bound on a leaf's Newton step, in log-odds.
pub const LEAF_CLIP: f64 = 4.0;

const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbdtParams {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub feature_subset: FeatureSubset,
}

impl Default for GbdtParams {
    fn default() -> Self {
        Self {
            n_rounds: 100,
            learning_rate: 0.1,
            max_depth: 3,
            min_leaf: 5,
            feature_subset: FeatureSubset::All,
        }
    }
}

/// Gradient boosted trees under logistic loss.
///
/// `score = sigmoid(base_score + learning_rate * sum(tree outputs))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel<F> {
    base_score: F,
    learning_rate: F,
    trees: Vec<TreeModel<F>>,
    n_features: usize,
    /// Mean training log-loss before any tree and after each round.
    train_loss: Vec<F>,
}

impl<F: Scalar> GbdtModel<F> {
    pub fn base_score(&self) -> F {
        self.base_score
    }

    pub fn learning_rate(&self) -> F {
        self.learning_rate
    }

    pub fn trees(&self) -> &[TreeModel<F>] {
        &self.trees
    }

    pub fn train_loss(&self) -> &[F] {
        &self.train_loss
    }

    pub fn raw_score(&self, row: &[F]) -> F {
        let sum: F = self.trees.iter().map(|t| t.predict(row)).sum();
        self.base_score + self.learning_rate * sum
    }
}

impl<F: Scalar> Classifier<F> for GbdtModel<F> {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn score_unchecked(&self, row: &[F]) -> F {
        self.raw_score(row).sigmoid()
    }
}

/// `log(1 + e^f) - y f`, stable for large `|f|`.
pub fn logistic_loss<F: Scalar>(y: F, f: F) -> F {
    let softplus = f.max(F::zero()) + (-f.abs()).exp().ln_1p();
    softplus - y * f
}

fn total_loss<F: Scalar>(y: &[F], raw: &[F], rows: impl Iterator<Item = usize>) -> f64 {
    exact_sum(rows.map(|i| logistic_loss(y[i], raw[i]).as_f64()))
}

/// Fits `n_rounds` trees, each to the residuals `y - sigmoid(score)`.
///
/// Leaf values are Newton steps `sum(r) / sum(p(1-p))` clipped to
/// `[-LEAF_CLIP, LEAF_CLIP]`. A leaf whose shrunken step would raise the loss
/// of its own rows is halved until it does not, so training loss never
/// increases from one round to the next.
pub fn fit_gbdt<F: Scalar>(
    x: &Matrix<F>,
    y: &[u8],
    params: &GbdtParams,
    seed: u64,
) -> Result<GbdtModel<F>, ModelError> {
    check_training(x, y)?;
    if !(params.learning_rate > 0.0 && params.learning_rate <= 1.0) {
        return Err(ModelError::InvalidParameter(format!(
            "learning_rate must lie in (0, 1], got {}",
            params.learning_rate
        )));
    }
    let n = x.n_rows();
    let positives = y.iter().filter(|&&l| l == 1).count();
    if positives == 0 || positives == n {
        return Err(ModelError::SingleClassLabels);
    }
    let p = F::from_usize_lossy(positives) / F::from_usize_lossy(n);
    let base_score = (p / (F::one() - p)).ln();
    let lr = F::lit(params.learning_rate);
    let clip = F::lit(LEAF_CLIP);
    let yf: Vec<F> = super::labels_as(y);
    let mut raw = vec![base_score; n];
    let nf = n as f64;
    let mut train_loss = vec![F::lit(total_loss(&yf, &raw, 0..n) / nf)];
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        feature_subset: params.feature_subset,
    };
    let all_rows: Vec<usize> = (0..n).collect();
    let mut trees = Vec::with_capacity(params.n_rounds);
    for round in 0..params.n_rounds {
        let prob: Vec<F> = raw.iter().map(|&f| f.sigmoid()).collect();
        let residual: Vec<F> = yf.iter().zip(&prob).map(|(&t, &q)| t - q).collect();
        let mut tree = fit_tree_on_rows(
            x,
            &residual,
            &all_rows,
            &tree_params,
            seed::derive_seed(seed, round as u64),
        )?;

        let mut members: Vec<Vec<usize>> = vec![Vec::new(); tree.nodes().len()];
        for i in 0..n {
            members[tree.leaf_index(x.row(i))].push(i);
        }
        for (leaf, rows) in members.iter().enumerate() {
            if rows.is_empty() {
                continue;
            }
            let g: F = rows.iter().map(|&i| residual[i]).sum();
            let h: F = rows.iter().map(|&i| prob[i] * (F::one() - prob[i])).sum();
            let mut step = if h > F::zero() {
                (g / h).max(-clip).min(clip)
            } else if g > F::zero() {
                clip
            } else if g < F::zero() {
                -clip
            } else {
                F::zero()
            };
            let before = total_loss(&yf, &raw, rows.iter().copied());
            let after = |s: F| exact_sum(rows.iter().map(|&i| logistic_loss(yf[i], raw[i] + lr * s).as_f64()));
            let mut halvings = 0;
            while after(step) > before {
                halvings += 1;
                step = if halvings > MAX_HALVINGS {
                    F::zero()
                } else {
                    step / F::lit(2.0)
                };
            }
            tree.set_leaf_value(leaf, step);
            for &i in rows {
                raw[i] = raw[i] + lr * step;
            }
        }
        train_loss.push(F::lit(total_loss(&yf, &raw, 0..n) / nf));
        trees.push(tree);
    }
    Ok(GbdtModel {
        base_score,
        learning_rate: lr,
        trees,
        n_features: x.n_cols(),
        train_loss,
    })
}

#[cfg(test)]
mod tests {
    use rand::Rng;

    use super::*;
    use crate::eval::pr_curve;

    fn noisy(seed: u64, n: usize) -> (Matrix<f64>, Vec<u8>) {
        let mut rng = seed::rng(seed);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.random()).collect()).collect();
        let y = rows
            .iter()
            .map(|r| u8::from(rng.random::<f64>() < (r[0] * 2.0 + r[1] - 1.5f64).exp() / 2.0))
            .collect();
        (Matrix::from_vecs(&rows), y)
    }

    #[test]
    fn zero_rounds_score_is_positive_rate() {
        let x = Matrix::from_vecs(&(0..10).map(|i| vec![i as f64]).collect::<Vec<_>>());
        let y = [1, 0, 0, 1, 0, 0, 1, 0, 1, 0];
        let m = fit_gbdt(
            &x,
            &y,
            &GbdtParams {
                n_rounds: 0,
                ..Default::default()
            },
            0,
        )
        .unwrap();
        for r in x.rows() {
            assert!((m.score(r).unwrap() - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_at_zero_score() {
        assert_eq!(1.0 - 0.0f64.sigmoid(), 0.5);
    }

    #[test]
    fn single_class_is_rejected() {
        let x = Matrix::from_vecs(&[vec![1.0], vec![2.0]]);
        assert!(matches!(
            fit_gbdt(&x, &[1, 1], &GbdtParams::default(), 0),
            Err(ModelError::SingleClassLabels)
        ));
    }

    #[test]
    fn separable_step_reaches_perfect_ap() {
        let x = Matrix::from_vecs(&(0..40).map(|i| vec![i as f64, (i % 7) as f64]).collect::<Vec<_>>());
        let y: Vec<u8> = (0..40).map(|i| u8::from(i >= 30)).collect();
        let p = GbdtParams {
            n_rounds: 20,
            learning_rate: 0.3,
            max_depth: 2,
            min_leaf: 1,
            ..Default::default()
        };
        let m = fit_gbdt(&x, &y, &p, 0).unwrap();
        let scores = m.score_matrix(&x).unwrap();
        assert_eq!(pr_curve(&scores, &y).unwrap().average_precision, 1.0);
    }

    #[test]
    fn loss_never_increases() {
        for seed in 0..3 {
            let (x, y) = noisy(seed, 300);
            for lr in [0.1, 1.0] {
                let p = GbdtParams {
                    n_rounds: 60,
                    learning_rate: lr,
                    max_depth: 3,
                    min_leaf: 1,
                    ..Default::default()
                };
                let m = fit_gbdt(&x, &y, &p, seed).unwrap();
                for w in m.train_loss().windows(2) {
                    assert!(w[1] <= w[0], "{} > {}", w[1], w[0]);
                }
                assert!(m.train_loss().last() < m.train_loss().first());
            }
        }
    }

    #[test]
    fn loss_is_stable_for_extreme_scores() {
        assert_eq!(logistic_loss(1.0, 800.0), 0.0);
        assert!((logistic_loss(0.0f64, 800.0) - 800.0).abs() < 1e-9);
        assert!((logistic_loss(1.0f64, 0.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn single_precision_training() {
        let (x, y) = noisy(9, 200);
        let rows: Vec<Vec<f32>> = x.rows().map(|r| r.iter().map(|&v| v as f32).collect()).collect();
        let x32 = Matrix::from_vecs(&rows);
        let m = fit_gbdt(
            &x32,
            &y,
            &GbdtParams {
                n_rounds: 30,
                ..Default::default()
            },
            1,
        )
        .unwrap();
        for w in m.train_loss().windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert!(x32.rows().all(|r| (0.0..=1.0).contains(&m.score(r).unwrap())));
    }
}
