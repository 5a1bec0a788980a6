//! Minimal dense networks with explicit forward/backward passes.
//!
//! This is the shared numerical substrate for every trained model in the
//! crate: VAE encoder/decoder, GAN generator/discriminator, the DDPM noise
//! predictor, reconstructors, and the attack classifier. Everything is f64,
//! single-sample, and hand-differentiated against a fixed activation
//! vocabulary; gradient correctness is pinned by finite-difference tests.

mod loss;
mod optim;
mod serialize;

pub use loss::{bce_loss, mse_loss};
pub use optim::{OptimKind, OptimizerState};
pub use serialize::{net_from_json, net_to_json};

use crate::error::{Error, Result};
use crate::rng::{RngSeed, StreamRng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Tanh,
    Sigmoid,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    z
                } else {
                    0.0
                }
            }
            Activation::Tanh => z.tanh(),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation output.
    #[inline]
    fn grad_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Identity => 1.0,
        }
    }
}

/// One dense layer: `y = activation(W x + b)`, weights row-major `(out, in)`.
#[derive(Debug, Clone)]
pub struct Layer {
    pub(crate) in_dim: usize,
    pub(crate) out_dim: usize,
    pub(crate) activation: Activation,
    pub(crate) weights: Vec<f64>,
    pub(crate) biases: Vec<f64>,
}

impl Layer {
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    fn forward_into(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for o in 0..self.out_dim {
            let row = o * self.in_dim;
            let mut z = self.biases[o];
            for (i, &xi) in x.iter().enumerate() {
                z += self.weights[row + i] * xi;
            }
            out.push(self.activation.apply(z));
        }
    }
}

/// A feed-forward stack of dense layers.
#[derive(Debug, Clone)]
pub struct DenseNet {
    layers: Vec<Layer>,
    in_dim: usize,
    out_dim: usize,
}

/// Per-layer parameter gradients plus the gradient w.r.t. the input.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<LayerGrads>,
    pub input: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LayerGrads {
    pub d_weights: Vec<f64>,
    pub d_biases: Vec<f64>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Gradients {
            layers: net
                .layers
                .iter()
                .map(|l| LayerGrads {
                    d_weights: vec![0.0; l.weights.len()],
                    d_biases: vec![0.0; l.biases.len()],
                })
                .collect(),
            input: vec![0.0; net.in_dim],
        }
    }

    /// `self += scale * other` over all parameter gradients.
    pub fn accumulate(&mut self, other: &Gradients, scale: f64) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            for (x, y) in a.d_weights.iter_mut().zip(&b.d_weights) {
                *x += scale * y;
            }
            for (x, y) in a.d_biases.iter_mut().zip(&b.d_biases) {
                *x += scale * y;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for l in &mut self.layers {
            for x in &mut l.d_weights {
                *x *= s;
            }
            for x in &mut l.d_biases {
                *x *= s;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| {
            l.d_weights.iter().all(|x| x.is_finite()) && l.d_biases.iter().all(|x| x.is_finite())
        })
    }
}

/// Activation record produced by [`DenseNet::forward`]; consumed by
/// [`DenseNet::backward`]. `values[0]` is the input, `values[k]` the output
/// of layer `k-1`.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    values: Vec<Vec<f64>>,
    shape_sig: Vec<(usize, usize)>,
}

impl DenseNet {
    /// Build a network from `(width, activation)` pairs. Weights are uniform
    /// in `±1/sqrt(fan_in)`, biases zero, deterministic in the seed.
    pub fn init(in_dim: usize, arch: &[(usize, Activation)], seed: RngSeed) -> Result<Self> {
        if arch.is_empty() {
            return Err(Error::InvalidArchitecture("empty layer list".into()));
        }
        if in_dim == 0 {
            return Err(Error::InvalidArchitecture("in_dim must be positive".into()));
        }
        if let Some(&(w, _)) = arch.iter().find(|&&(w, _)| w == 0) {
            return Err(Error::InvalidArchitecture(format!("layer width {w} must be positive")));
        }
        let mut rng = StreamRng::new(seed);
        let mut layers = Vec::with_capacity(arch.len());
        let mut fan_in = in_dim;
        for &(width, activation) in arch {
            let scale = 1.0 / (fan_in as f64).sqrt();
            let weights: Vec<f64> = (0..width * fan_in)
                .map(|_| rng.uniform_in(-scale, scale))
                .collect();
            layers.push(Layer {
                in_dim: fan_in,
                out_dim: width,
                activation,
                weights,
                biases: vec![0.0; width],
            });
            fan_in = width;
        }
        Ok(DenseNet {
            in_dim,
            out_dim: fan_in,
            layers,
        })
    }

    /// Build a network directly from layers; used by deserialization and tests.
    pub fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArchitecture("empty layer list".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::InvalidArchitecture(format!(
                    "layer dims do not chain: {} -> {}",
                    pair[0].out_dim, pair[1].in_dim
                )));
            }
        }
        Ok(DenseNet {
            in_dim: layers[0].in_dim,
            out_dim: layers[layers.len() - 1].out_dim,
            layers,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    fn shape_sig(&self) -> Vec<(usize, usize)> {
        self.layers.iter().map(|l| (l.in_dim, l.out_dim)).collect()
    }

    /// Forward pass returning the output and the activation record needed by
    /// [`DenseNet::backward`].
    pub fn forward(&self, x: &[f64]) -> Result<(Vec<f64>, ForwardCache)> {
        if x.len() != self.in_dim {
            return Err(Error::ShapeMismatch(format!(
                "input len {} vs net in_dim {}",
                x.len(),
                self.in_dim
            )));
        }
        let mut values = Vec::with_capacity(self.layers.len() + 1);
        values.push(x.to_vec());
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers {
            layer.forward_into(&cur, &mut next);
            values.push(next.clone());
            std::mem::swap(&mut cur, &mut next);
        }
        Ok((
            cur,
            ForwardCache {
                values,
                shape_sig: self.shape_sig(),
            },
        ))
    }

    /// Forward pass without a cache, for inference hot paths.
    pub fn forward_value(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim {
            return Err(Error::ShapeMismatch(format!(
                "input len {} vs net in_dim {}",
                x.len(),
                self.in_dim
            )));
        }
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        for layer in &self.layers {
            layer.forward_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// Chain-rule gradients of a scalar loss given `dL/dy`.
    pub fn backward(&self, cache: &ForwardCache, dl_dy: &[f64]) -> Result<Gradients> {
        if cache.shape_sig != self.shape_sig() {
            return Err(Error::StaleCache(
                "cache was produced by a network with a different shape".into(),
            ));
        }
        if dl_dy.len() != self.out_dim {
            return Err(Error::ShapeMismatch(format!(
                "dl_dy len {} vs net out_dim {}",
                dl_dy.len(),
                self.out_dim
            )));
        }
        let mut grads = Gradients::zeros_like(self);
        let mut d_out = dl_dy.to_vec();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            let x_in = &cache.values[k];
            let y_out = &cache.values[k + 1];
            let mut d_in = vec![0.0; layer.in_dim];
            let lg = &mut grads.layers[k];
            for o in 0..layer.out_dim {
                let dz = d_out[o] * layer.activation.grad_from_output(y_out[o]);
                lg.d_biases[o] = dz;
                let row = o * layer.in_dim;
                for i in 0..layer.in_dim {
                    lg.d_weights[row + i] = dz * x_in[i];
                    d_in[i] += layer.weights[row + i] * dz;
                }
            }
            d_out = d_in;
        }
        grads.input = d_out;
        Ok(grads)
    }

    /// Total number of scalar parameters.
    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.biases.len()).sum()
    }

    /// Visit every parameter mutably; used by the optimizer and by
    /// finite-difference tests.
    pub fn for_each_param_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        for l in &mut self.layers {
            for w in &mut l.weights {
                f(w);
            }
            for b in &mut l.biases {
                f(b);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_layer(weights: Vec<f64>, biases: Vec<f64>, in_dim: usize, act: Activation) -> DenseNet {
        let out_dim = biases.len();
        DenseNet::from_layers(vec![Layer {
            in_dim,
            out_dim,
            activation: act,
            weights,
            biases,
        }])
        .unwrap()
    }

    #[test]
    fn init_rejects_zero_width() {
        let err = DenseNet::init(4, &[(0, Activation::Relu)], RngSeed::new(0, 0));
        assert!(matches!(err, Err(Error::InvalidArchitecture(_))));
    }

    #[test]
    fn init_is_deterministic_with_zero_biases() {
        let arch = [(4, Activation::Identity)];
        let a = DenseNet::init(4, &arch, RngSeed::new(9, 2)).unwrap();
        let b = DenseNet::init(4, &arch, RngSeed::new(9, 2)).unwrap();
        for (la, lb) in a.layers.iter().zip(&b.layers) {
            assert_eq!(la.weights, lb.weights);
            assert!(la.biases.iter().all(|&x| x == 0.0));
        }
        assert_eq!(a.layers[0].weights.len(), 16);
    }

    #[test]
    fn identity_layer_passes_input_through() {
        let net = single_layer(
            vec![1.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0],
            2,
            Activation::Identity,
        );
        let (y, _) = net.forward(&[1.0, 2.0]).unwrap();
        assert_eq!(y, vec![1.0, 2.0]);
    }

    #[test]
    fn sigmoid_of_zero_is_half() {
        let net = single_layer(vec![0.0, 0.0], vec![0.0], 2, Activation::Sigmoid);
        let (y, _) = net.forward(&[3.0, -8.0]).unwrap();
        assert_eq!(y, vec![0.5]);
    }

    #[test]
    fn relu_clips_negative_preactivation() {
        // W=[[1,1]], b=[-1], x=(0.3,0.4): z = 0.7-1 < 0 -> 0
        let net = single_layer(vec![1.0, 1.0], vec![-1.0], 2, Activation::Relu);
        let (y, _) = net.forward(&[0.3, 0.4]).unwrap();
        assert_eq!(y, vec![0.0]);
    }

    #[test]
    fn forward_rejects_wrong_input_len() {
        let net = single_layer(vec![0.0, 0.0], vec![0.0], 2, Activation::Identity);
        assert!(matches!(net.forward(&[1.0]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn zero_upstream_gradient_zeroes_everything() {
        let net = DenseNet::init(3, &[(5, Activation::Tanh), (2, Activation::Sigmoid)], RngSeed::new(1, 1)).unwrap();
        let (_, cache) = net.forward(&[0.3, -0.2, 0.9]).unwrap();
        let g = net.backward(&cache, &[0.0, 0.0]).unwrap();
        for lg in &g.layers {
            assert!(lg.d_weights.iter().all(|&x| x == 0.0));
            assert!(lg.d_biases.iter().all(|&x| x == 0.0));
        }
        assert!(g.input.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn identity_layer_weight_gradient_is_outer_product() {
        // L = y . v  =>  dL/dW = v x^T
        let net = single_layer(vec![0.1, 0.2, 0.3, 0.4], vec![0.0, 0.0], 2, Activation::Identity);
        let x = [2.0, -1.0];
        let v = [0.5, 3.0];
        let (_, cache) = net.forward(&x).unwrap();
        let g = net.backward(&cache, &v).unwrap();
        let expect = [v[0] * x[0], v[0] * x[1], v[1] * x[0], v[1] * x[1]];
        assert_eq!(g.layers[0].d_weights, expect.to_vec());
        assert_eq!(g.layers[0].d_biases, v.to_vec());
    }

    #[test]
    fn backward_rejects_stale_cache() {
        let a = DenseNet::init(3, &[(4, Activation::Tanh)], RngSeed::new(0, 0)).unwrap();
        let b = DenseNet::init(3, &[(5, Activation::Tanh)], RngSeed::new(0, 0)).unwrap();
        let (_, cache) = a.forward(&[0.1, 0.2, 0.3]).unwrap();
        assert!(matches!(
            b.backward(&cache, &[0.0; 5]),
            Err(Error::StaleCache(_))
        ));
    }

    /// Scalar loss used by the finite-difference checks: L = sum(y * v).
    fn probe_loss(net: &DenseNet, x: &[f64], v: &[f64]) -> f64 {
        let y = net.forward_value(x).unwrap();
        y.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    #[test]
    fn gradients_match_central_finite_differences() {
        let mut rng = StreamRng::new(RngSeed::new(77, 0));
        let arch = [(6, Activation::Tanh), (3, Activation::Sigmoid)];
        let net = DenseNet::init(4, &arch, RngSeed::new(77, 1)).unwrap();
        let x: Vec<f64> = (0..4).map(|_| rng.normal()).collect();
        let v: Vec<f64> = (0..3).map(|_| rng.normal()).collect();

        let (_, cache) = net.forward(&x).unwrap();
        let analytic = net.backward(&cache, &v).unwrap();

        let h = 1e-5;
        let mut idx = 0usize;
        let flat_analytic: Vec<f64> = analytic
            .layers
            .iter()
            .flat_map(|l| l.d_weights.iter().chain(l.d_biases.iter()).copied().collect::<Vec<_>>())
            .collect();
        let n_params = net.param_count();
        for p in 0..n_params {
            let mut plus = net.clone();
            let mut minus = net.clone();
            let mut k = 0usize;
            plus.for_each_param_mut(|w| {
                if k == p {
                    *w += h;
                }
                k += 1;
            });
            k = 0;
            minus.for_each_param_mut(|w| {
                if k == p {
                    *w -= h;
                }
                k += 1;
            });
            let numeric = (probe_loss(&plus, &x, &v) - probe_loss(&minus, &x, &v)) / (2.0 * h);
            let a = flat_analytic[idx];
            let denom = a.abs().max(numeric.abs()).max(1e-8);
            assert!(
                ((a - numeric) / denom).abs() < 1e-5,
                "param {p}: analytic {a} vs numeric {numeric}"
            );
            idx += 1;
        }
    }
}
