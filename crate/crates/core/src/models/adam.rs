use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates for a flat parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<F> {
    pub config: AdamConfig,
    m: Vec<F>,
    v: Vec<F>,
    step: u64,
}

impl<F: Scalar> AdamState<F> {
    pub fn new(n_params: usize, config: AdamConfig) -> Self {
        Self {
            config,
            m: vec![F::zero(); n_params],
            v: vec![F::zero(); n_params],
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One bias-corrected update.
    pub fn update(&mut self, params: &mut [F], grads: &[F]) {
        assert_eq!(params.len(), self.m.len(), "parameter count");
        assert_eq!(grads.len(), self.m.len(), "gradient count");
        self.step += 1;
        let c = &self.config;
        let (b1, b2) = (F::lit(c.beta1), F::lit(c.beta2));
        let lr = F::lit(c.learning_rate);
        let eps = F::lit(c.epsilon);
        let t = self.step.min(i32::MAX as u64) as i32;
        let corr1 = F::one() - b1.powi(t);
        let corr2 = F::one() - b2.powi(t);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = b1 * self.m[i] + (F::one() - b1) * g;
            self.v[i] = b2 * self.v[i] + (F::one() - b2) * g * g;
            let m_hat = self.m[i] / corr1;
            let v_hat = self.v[i] / corr2;
            params[i] = params[i] - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_is_a_fixed_point() {
        let mut p = vec![0.5f64, -1.25, 3.0];
        let before = p.clone();
        let mut s = AdamState::new(3, AdamConfig::default());
        s.update(&mut p, &[0.0; 3]);
        assert_eq!(p, before);
        assert_eq!(s.step_count(), 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        // bias correction makes the first step lr * g / (|g| + eps)
        let mut p = vec![1.0f64, 1.0];
        let mut s = AdamState::new(
            2,
            AdamConfig {
                learning_rate: 0.1,
                ..Default::default()
            },
        );
        s.update(&mut p, &[2.0, -0.5]);
        assert!((p[0] - 0.9).abs() < 1e-7);
        assert!((p[1] - 1.1).abs() < 1e-7);
    }

    #[test]
    fn minimizes_a_quadratic() {
        let mut p = vec![5.0f64];
        let mut s = AdamState::new(
            1,
            AdamConfig {
                learning_rate: 0.05,
                ..Default::default()
            },
        );
        for _ in 0..2000 {
            let g = [2.0 * (p[0] - 1.5)];
            s.update(&mut p, &g);
        }
        assert!((p[0] - 1.5).abs() < 1e-3);
    }
}
