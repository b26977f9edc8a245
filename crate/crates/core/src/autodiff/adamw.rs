//! Adam with decoupled weight decay.

use serde::{Deserialize, Serialize};

use super::tensor::Parameters;
use super::AutodiffError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamWConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
}

impl Default for AdamWConfig {
    fn default() -> Self {
        Self { lr: 1e-3, beta1: 0.9, beta2: 0.999, eps: 1e-8, weight_decay: 1e-2 }
    }
}

/// Per-parameter moment estimates. Tensors that do not require gradients
/// keep empty moment buffers and are never updated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamWState {
    pub config: AdamWConfig,
    pub step: u64,
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

impl AdamWState {
    pub fn new(config: AdamWConfig, params: &Parameters) -> Self {
        let sized = params
            .tensors()
            .iter()
            .map(|t| if t.requires_grad() { vec![0.0; t.len()] } else { Vec::new() })
            .collect::<Vec<_>>();
        Self { config, step: 0, m: sized.clone(), v: sized }
    }

    /// One update over every trainable tensor:
    /// `p -= lr * wd * p`, then `p -= lr * m_hat / (sqrt(v_hat) + eps)`.
    pub fn step(&mut self, params: &mut Parameters) -> Result<(), AutodiffError> {
        if self.m.len() != params.len() {
            return Err(AutodiffError::Contract(format!(
                "optimizer tracks {} tensors, store has {}",
                self.m.len(),
                params.len()
            )));
        }
        for (i, t) in params.tensors().iter().enumerate() {
            if t.requires_grad() && t.grad().is_none() {
                return Err(AutodiffError::Contract(format!("parameter {i} has no gradient")));
            }
        }
        let AdamWConfig { lr, beta1, beta2, eps, weight_decay } = self.config;
        self.step += 1;
        let bc1 = 1.0 - beta1.powf(self.step as f64);
        let bc2 = 1.0 - beta2.powf(self.step as f64);
        for ((t, m), v) in params.tensors_mut().iter_mut().zip(&mut self.m).zip(&mut self.v) {
            if !t.requires_grad() {
                continue;
            }
            let grad = t.grad().expect("checked above").to_vec();
            for (((p, g), m), v) in t.values_mut().iter_mut().zip(&grad).zip(m.iter_mut()).zip(v.iter_mut()) {
                *p -= lr * weight_decay * *p;
                *m = beta1 * *m + (1.0 - beta1) * g;
                *v = beta2 * *v + (1.0 - beta2) * g * g;
                let m_hat = *m / bc1;
                let v_hat = *v / bc2;
                *p -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}
