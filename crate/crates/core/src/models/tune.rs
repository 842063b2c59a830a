use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    fit_forest, fit_gbdt, fit_mlp, AdamConfig, Classifier, ForestParams, GbdtParams, Matrix, MlpParams, Model,
    ModelError,
};
use crate::eval::{pr_curve, EvalError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Forest,
    Gbdt,
    Mlp,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 3] = [ModelFamily::Forest, ModelFamily::Gbdt, ModelFamily::Mlp];

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::Forest => "forest",
            ModelFamily::Gbdt => "gbdt",
            ModelFamily::Mlp => "mlp",
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forest" => Ok(ModelFamily::Forest),
            "gbdt" => Ok(ModelFamily::Gbdt),
            "mlp" => Ok(ModelFamily::Mlp),
            other => Err(format!("unknown model {other:?} (expected forest, gbdt or mlp)")),
        }
    }
}

/// One point of a hyper-parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum HyperParams {
    Forest(ForestParams),
    Gbdt(GbdtParams),
    Mlp(MlpParams),
}

impl HyperParams {
    pub fn family(&self) -> ModelFamily {
        match self {
            HyperParams::Forest(_) => ModelFamily::Forest,
            HyperParams::Gbdt(_) => ModelFamily::Gbdt,
            HyperParams::Mlp(_) => ModelFamily::Mlp,
        }
    }
}

pub fn default_grid(family: ModelFamily) -> Vec<HyperParams> {
    match family {
        ModelFamily::Forest => {
            let mut g = Vec::new();
            for n_trees in [100, 300] {
                for max_depth in [6, 10] {
                    g.push(HyperParams::Forest(ForestParams {
                        n_trees,
                        max_depth,
                        ..Default::default()
                    }));
                }
            }
            g
        }
        ModelFamily::Gbdt => {
            let mut g = Vec::new();
            for n_rounds in [100, 300] {
                for learning_rate in [0.05, 0.1] {
                    for max_depth in [3, 5] {
                        g.push(HyperParams::Gbdt(GbdtParams {
                            n_rounds,
                            learning_rate,
                            max_depth,
                            ..Default::default()
                        }));
                    }
                }
            }
            g
        }
        ModelFamily::Mlp => [vec![32], vec![64, 32]]
            .into_iter()
            .map(|hidden| {
                HyperParams::Mlp(MlpParams {
                    hidden,
                    epochs: 50,
                    adam: AdamConfig {
                        learning_rate: 1e-3,
                        ..Default::default()
                    },
                    ..Default::default()
                })
            })
            .collect(),
    }
}

pub fn fit_model<F: Scalar>(x: &Matrix<F>, y: &[u8], params: &HyperParams, seed: u64) -> Result<Model<F>, ModelError> {
    Ok(match params {
        HyperParams::Forest(p) => Model::Forest(fit_forest(x, y, p, seed)?),
        HyperParams::Gbdt(p) => Model::Gbdt(fit_gbdt(x, y, p, seed)?),
        HyperParams::Mlp(p) => Model::Mlp(fit_mlp(x, y, p, seed)?),
    })
}

#[derive(Debug, Clone)]
pub struct TuneResult<F> {
    pub best: HyperParams,
    pub best_index: usize,
    /// Validation AP per grid point; `None` when the validation split has no
    /// positives, in which case every point ties and the first wins.
    pub val_ap: Vec<Option<f64>>,
    pub model: Model<F>,
}

/// Exhaustive grid search on validation average precision.
///
/// Every point is trained on the training split with the same seed; the
/// returned model is the winner's training-split fit. Ties go to the
/// earlier grid point.
pub fn tune<F: Scalar>(
    grid: &[HyperParams],
    train: (&Matrix<F>, &[u8]),
    val: (&Matrix<F>, &[u8]),
    seed: u64,
) -> Result<TuneResult<F>, ModelError> {
    if grid.is_empty() {
        return Err(ModelError::EmptyGrid);
    }
    let fitted: Vec<(Model<F>, Option<f64>)> = grid
        .par_iter()
        .map(|p| {
            let model = fit_model(train.0, train.1, p, seed)?;
            let scores = model.score_matrix(val.0)?;
            let ap = match pr_curve(&scores, val.1) {
                Ok(c) => Some(c.average_precision.as_f64()),
                Err(EvalError::NoPositives) => None,
                Err(e) => return Err(e.into()),
            };
            Ok((model, ap))
        })
        .collect::<Result<_, ModelError>>()?;
    let mut best_index = 0;
    for (i, (_, ap)) in fitted.iter().enumerate() {
        if let (Some(a), Some(b)) = (ap, fitted[best_index].1) {
            if *a > b {
                best_index = i;
            }
        }
    }
    let val_ap = fitted.iter().map(|(_, ap)| *ap).collect();
    let model = fitted.into_iter().nth(best_index).expect("index in range").0;
    Ok(TuneResult {
        best: grid[best_index].clone(),
        best_index,
        val_ap,
        model,
    })
}
