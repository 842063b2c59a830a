use serde::{Deserialize, Serialize};

use super::{Dataset, FeatureError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Range<F> {
    min: Vec<F>,
    max: Vec<F>,
}

/// Per-feature min-max scaling fitted on training examples only.
///
/// Values outside the training range map outside `[0, 1]`; constant training
/// columns map to `0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer<F> {
    range: Option<Range<F>>,
}

impl<F: Scalar> Default for Normalizer<F> {
    fn default() -> Self {
        Self { range: None }
    }
}

impl<F: Scalar> Normalizer<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_fitted(&self) -> bool {
        self.range.is_some()
    }

    pub fn fit(&mut self, train: &Dataset<F>) -> Result<(), FeatureError> {
        if self.range.is_some() {
            return Err(FeatureError::AlreadyFitted);
        }
        let first = train.examples.first().ok_or(FeatureError::EmptyDataset)?;
        let mut min = first.features.clone();
        let mut max = first.features.clone();
        for e in &train.examples[1..] {
            for (j, &x) in e.features.iter().enumerate() {
                if x < min[j] {
                    min[j] = x;
                }
                if x > max[j] {
                    max[j] = x;
                }
            }
        }
        self.range = Some(Range { min, max });
        Ok(())
    }

    pub fn min(&self) -> Option<&[F]> {
        self.range.as_ref().map(|r| r.min.as_slice())
    }

    pub fn max(&self) -> Option<&[F]> {
        self.range.as_ref().map(|r| r.max.as_slice())
    }

    pub fn transform_row(&self, row: &[F]) -> Result<Vec<F>, FeatureError> {
        let r = self.range.as_ref().ok_or(FeatureError::UnfittedNormalizer)?;
        if row.len() != r.min.len() {
            return Err(FeatureError::DimensionMismatch {
                expected: r.min.len(),
                found: row.len(),
            });
        }
        Ok(row
            .iter()
            .zip(r.min.iter().zip(&r.max))
            .map(|(&x, (&lo, &hi))| {
                let span = hi - lo;
                if span > F::zero() {
                    (x - lo) / span
                } else {
                    F::zero()
                }
            })
            .collect())
    }

    pub fn apply(&self, data: &Dataset<F>) -> Result<Dataset<F>, FeatureError> {
        let mut out = data.clone();
        for e in &mut out.examples {
            e.features = self.transform_row(&e.features)?;
        }
        Ok(out)
    }
}

pub fn fit_normalizer<F: Scalar>(train: &Dataset<F>) -> Result<Normalizer<F>, FeatureError> {
    let mut n = Normalizer::new();
    n.fit(train)?;
    Ok(n)
}

pub fn apply_normalizer<F: Scalar>(normalizer: &Normalizer<F>, data: &Dataset<F>) -> Result<Dataset<F>, FeatureError> {
    normalizer.apply(data)
}
