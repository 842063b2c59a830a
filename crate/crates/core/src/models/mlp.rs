use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::{AdamConfig, AdamState};
use super::gbdt::logistic_loss;
use super::{check_training, labels_as, Classifier, Matrix, ModelError};
use crate::scalar::Scalar;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
}

impl Default for MlpParams {
    fn default() -> Self {
        Self {
            hidden: vec![32],
            epochs: 50,
            batch_size: 64,
            adam: AdamConfig::default(),
        }
    }
}

/// Fully connected network: rectified-linear hidden layers, one sigmoid output.
///
/// Parameters live in one flat vector; layer `l` stores its `out x in`
/// weight matrix row-major followed by its `out` biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkModel<F> {
    sizes: Vec<usize>,
    params: Vec<F>,
    /// Mean training loss per epoch.
    epoch_loss: Vec<F>,
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl<F: Scalar> NetworkModel<F> {
    /// Network with Glorot-uniform weights and zero biases.
    pub fn init(n_inputs: usize, hidden: &[usize], seed: u64) -> Self {
        let mut sizes = Vec::with_capacity(hidden.len() + 2);
        sizes.push(n_inputs);
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        let mut rng = seed::rng(seed);
        let mut params = Vec::with_capacity(param_count(&sizes));
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            params.extend((0..fan_in * fan_out).map(|_| F::lit(rng.random_range(-limit..=limit))));
            params.extend(std::iter::repeat_n(F::zero(), fan_out));
        }
        Self {
            sizes,
            params,
            epoch_loss: Vec::new(),
        }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn params(&self) -> &[F] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [F] {
        &mut self.params
    }

    pub fn epoch_loss(&self) -> &[F] {
        &self.epoch_loss
    }

    /// Pre-activations of every layer for one input.
    fn forward(&self, row: &[F]) -> Vec<Vec<F>> {
        let mut pre = Vec::with_capacity(self.sizes.len() - 1);
        let mut act: Vec<F> = row.to_vec();
        let mut off = 0;
        let last = self.sizes.len() - 2;
        for (l, w) in self.sizes.windows(2).enumerate() {
            let (n_in, n_out) = (w[0], w[1]);
            let weights = &self.params[off..off + n_in * n_out];
            let bias = &self.params[off + n_in * n_out..off + n_in * n_out + n_out];
            let z: Vec<F> = (0..n_out)
                .map(|o| {
                    let wr = &weights[o * n_in..(o + 1) * n_in];
                    wr.iter().zip(&act).fold(bias[o], |s, (&a, &b)| s + a * b)
                })
                .collect();
            off += n_in * n_out + n_out;
            act = if l == last {
                z.clone()
            } else {
                z.iter().map(|&v| v.max(F::zero())).collect()
            };
            pre.push(z);
        }
        pre
    }

    pub fn logit(&self, row: &[F]) -> F {
        self.forward(row).last().expect("output layer")[0]
    }

    /// Mean binary cross-entropy over `rows` and its gradient.
    pub fn loss_and_gradient(&self, x: &Matrix<F>, y: &[F], rows: &[usize]) -> (F, Vec<F>) {
        let mut grad = vec![F::zero(); self.params.len()];
        let mut loss = F::zero();
        let n_layers = self.sizes.len() - 1;
        for &r in rows {
            let input = x.row(r);
            let pre = self.forward(input);
            let z_out = pre[n_layers - 1][0];
            loss = loss + logistic_loss(y[r], z_out);
            let mut delta = vec![z_out.sigmoid() - y[r]];
            let mut off_end = self.params.len();
            for l in (0..n_layers).rev() {
                let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
                let off = off_end - (n_in * n_out + n_out);
                let act_in: Vec<F> = if l == 0 {
                    input.to_vec()
                } else {
                    pre[l - 1].iter().map(|&v| v.max(F::zero())).collect()
                };
                for o in 0..n_out {
                    let d = delta[o];
                    let gw = &mut grad[off + o * n_in..off + (o + 1) * n_in];
                    for (g, &a) in gw.iter_mut().zip(&act_in) {
                        *g = *g + d * a;
                    }
                    let gb = &mut grad[off + n_in * n_out + o];
                    *gb = *gb + d;
                }
                if l > 0 {
                    let weights = &self.params[off..off + n_in * n_out];
                    delta = (0..n_in)
                        .map(|i| {
                            if pre[l - 1][i] > F::zero() {
                                (0..n_out).fold(F::zero(), |s, o| s + weights[o * n_in + i] * delta[o])
                            } else {
                                F::zero()
                            }
                        })
                        .collect();
                }
                off_end = off;
            }
        }
        let scale = F::one() / F::from_usize_lossy(rows.len().max(1));
        for g in &mut grad {
            *g = *g * scale;
        }
        (loss * scale, grad)
    }
}

impl<F: Scalar> Classifier<F> for NetworkModel<F> {
    fn n_features(&self) -> usize {
        self.sizes[0]
    }

    fn score_unchecked(&self, row: &[F]) -> F {
        self.logit(row).sigmoid()
    }
}

/// Mini-batch Adam on mean binary cross-entropy; batch order comes from a
/// per-epoch shuffle of the seeded generator.
pub fn fit_mlp<F: Scalar>(
    x: &Matrix<F>,
    y: &[u8],
    params: &MlpParams,
    seed: u64,
) -> Result<NetworkModel<F>, ModelError> {
    check_training(x, y)?;
    if params.epochs == 0 || params.batch_size == 0 {
        return Err(ModelError::InvalidParameter(
            "epochs and batch_size must be >= 1".into(),
        ));
    }
    if params.hidden.contains(&0) {
        return Err(ModelError::InvalidParameter("hidden layers must be non-empty".into()));
    }
    let yf: Vec<F> = labels_as(y);
    let mut net = NetworkModel::init(x.n_cols(), &params.hidden, seed::derive_seed(seed, 0));
    let mut adam = AdamState::new(net.params.len(), params.adam);
    let mut rng = seed::rng(seed::derive_seed(seed, 1));
    let mut order: Vec<usize> = (0..x.n_rows()).collect();
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        let mut total = F::zero();
        for (batch, rows) in order.chunks(params.batch_size).enumerate() {
            let (loss, grad) = net.loss_and_gradient(x, &yf, rows);
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(ModelError::NonFiniteLoss { epoch, batch });
            }
            total = total + loss * F::from_usize_lossy(rows.len());
            adam.update(&mut net.params, &grad);
        }
        net.epoch_loss.push(total / F::from_usize_lossy(x.n_rows()));
    }
    Ok(net)
}
