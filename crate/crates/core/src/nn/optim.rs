//! SGD and Adam parameter updates.

use super::{DenseNet, Gradients};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimKind {
    Sgd,
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
}

#[derive(Debug, Clone)]
struct LayerMoments {
    m_weights: Vec<f64>,
    v_weights: Vec<f64>,
    m_biases: Vec<f64>,
    v_biases: Vec<f64>,
}

/// Optimizer state; Adam keeps first/second moments shaped like the network.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub kind: OptimKind,
    pub learning_rate: f64,
    pub step_count: u64,
    moments: Vec<LayerMoments>,
}

impl OptimizerState {
    pub fn sgd(learning_rate: f64) -> Self {
        OptimizerState {
            kind: OptimKind::Sgd,
            learning_rate,
            step_count: 0,
            moments: Vec::new(),
        }
    }

    /// Adam with the standard defaults (0.9, 0.999, 1e-8).
    pub fn adam(learning_rate: f64) -> Self {
        Self::adam_with(learning_rate, 0.9, 0.999, 1e-8)
    }

    pub fn adam_with(learning_rate: f64, beta1: f64, beta2: f64, epsilon: f64) -> Self {
        OptimizerState {
            kind: OptimKind::Adam { beta1, beta2, epsilon },
            learning_rate,
            step_count: 0,
            moments: Vec::new(),
        }
    }

    fn ensure_moments(&mut self, net: &DenseNet) {
        if self.moments.len() == net.layers().len() {
            return;
        }
        self.moments = net
            .layers()
            .iter()
            .map(|l| LayerMoments {
                m_weights: vec![0.0; l.weights.len()],
                v_weights: vec![0.0; l.weights.len()],
                m_biases: vec![0.0; l.biases.len()],
                v_biases: vec![0.0; l.biases.len()],
            })
            .collect();
    }

    /// Apply one update step. Increments `step_count` by exactly one.
    pub fn step(&mut self, net: &mut DenseNet, grads: &Gradients) -> Result<()> {
        if grads.layers.len() != net.layers().len() {
            return Err(Error::ShapeMismatch(format!(
                "gradient layers {} vs net layers {}",
                grads.layers.len(),
                net.layers().len()
            )));
        }
        if !grads.is_finite() {
            return Err(Error::TrainingDiverged("non-finite gradient".into()));
        }
        match self.kind {
            OptimKind::Sgd => {
                let lr = self.learning_rate;
                for (layer, lg) in net.layers.iter_mut().zip(&grads.layers) {
                    for (w, &g) in layer.weights.iter_mut().zip(&lg.d_weights) {
                        *w -= lr * g;
                    }
                    for (b, &g) in layer.biases.iter_mut().zip(&lg.d_biases) {
                        *b -= lr * g;
                    }
                }
            }
            OptimKind::Adam { beta1, beta2, epsilon } => {
                self.ensure_moments(net);
                let t = (self.step_count + 1) as f64;
                let bc1 = 1.0 - beta1.powf(t);
                let bc2 = 1.0 - beta2.powf(t);
                let lr = self.learning_rate;
                for ((layer, lg), mom) in net
                    .layers
                    .iter_mut()
                    .zip(&grads.layers)
                    .zip(&mut self.moments)
                {
                    adam_update(&mut layer.weights, &lg.d_weights, &mut mom.m_weights, &mut mom.v_weights, lr, beta1, beta2, epsilon, bc1, bc2);
                    adam_update(&mut layer.biases, &lg.d_biases, &mut mom.m_biases, &mut mom.v_biases, lr, beta1, beta2, epsilon, bc1, bc2);
                }
            }
        }
        self.step_count += 1;
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn adam_update(
    params: &mut [f64],
    grads: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
    bc1: f64,
    bc2: f64,
) {
    for i in 0..params.len() {
        let g = grads[i];
        m[i] = beta1 * m[i] + (1.0 - beta1) * g;
        v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
        let m_hat = m[i] / bc1;
        let v_hat = v[i] / bc2;
        params[i] -= lr * m_hat / (v_hat.sqrt() + epsilon);
    }
}
