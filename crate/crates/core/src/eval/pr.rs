use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrPoint<F> {
    pub threshold: F,
    pub precision: F,
    pub recall: F,
}

/// Precision-recall curve with one point per distinct score, highest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrCurve<F> {
    pub points: Vec<PrPoint<F>>,
    pub average_precision: F,
    pub positive_count: usize,
    pub total_count: usize,
}

impl<F: Scalar> PrCurve<F> {
    pub fn positive_fraction(&self) -> f64 {
        self.positive_count as f64 / self.total_count as f64
    }
}

/// Predicting a positive for every score `>= threshold`, swept over the
/// distinct scores. AP is the step sum `sum_k (R_k - R_{k-1}) * P_k`.
pub fn pr_curve<F: Scalar>(scores: &[F], labels: &[u8]) -> Result<PrCurve<F>, EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(EvalError::NonFiniteScore(i));
    }
    if let Some(i) = labels.iter().position(|&l| l > 1) {
        return Err(EvalError::InvalidLabel(i));
    }
    let positives = labels.iter().filter(|&&l| l == 1).count();
    if positives == 0 {
        return Err(EvalError::NoPositives);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));

    let mut points = Vec::new();
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut ap = 0.0f64;
    let mut prev_recall = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let t = scores[order[i]];
        while i < order.len() && scores[order[i]] == t {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let precision = tp as f64 / (tp + fp) as f64;
        let recall = tp as f64 / positives as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        points.push(PrPoint {
            threshold: t,
            precision: F::lit(precision),
            recall: F::lit(recall),
        });
    }
    Ok(PrCurve {
        points,
        average_precision: F::lit(ap),
        positive_count: positives,
        total_count: labels.len(),
    })
}

/// Expected curve of a classifier that ranks at random.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineCurve {
    pub precision_level: f64,
}

pub fn random_baseline(labels: &[u8]) -> Result<BaselineCurve, EvalError> {
    if labels.is_empty() {
        return Err(EvalError::Empty);
    }
    let pos = labels.iter().filter(|&&l| l == 1).count();
    Ok(BaselineCurve {
        precision_level: pos as f64 / labels.len() as f64,
    })
}

/// Largest recall among points whose precision reaches `target`, or 0.
pub fn recall_at_precision<F: Scalar>(curve: &PrCurve<F>, target: F) -> F {
    curve
        .points
        .iter()
        .filter(|p| p.precision >= target)
        .map(|p| p.recall)
        .fold(F::zero(), F::max)
}
