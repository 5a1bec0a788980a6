//! Versioned JSON model format.
//!
//! Weights are written as nested arrays of decimal floats; the JSON emitter
//! uses shortest round-trip formatting, so values survive a round trip at
//! full 64-bit precision.

use super::{Activation, DenseNet, Layer};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub(crate) const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct NetDoc {
    format_version: u32,
    in_dim: usize,
    arch: Vec<LayerDoc>,
}

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    width: usize,
    activation: Activation,
    /// Row-major rows of length `in_dim` for this layer.
    weights: Vec<Vec<f64>>,
    biases: Vec<f64>,
}

pub fn net_to_json(net: &DenseNet) -> String {
    let doc = NetDoc {
        format_version: FORMAT_VERSION,
        in_dim: net.in_dim(),
        arch: net
            .layers()
            .iter()
            .map(|l| LayerDoc {
                width: l.out_dim,
                activation: l.activation,
                weights: l.weights.chunks(l.in_dim).map(|r| r.to_vec()).collect(),
                biases: l.biases.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("net serialization cannot fail")
}

pub fn net_from_json(text: &str) -> Result<DenseNet> {
    let doc: NetDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("model json: {e}")))?;
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::Parse(format!(
            "unsupported model format_version {}",
            doc.format_version
        )));
    }
    let mut layers = Vec::with_capacity(doc.arch.len());
    let mut fan_in = doc.in_dim;
    for (k, l) in doc.arch.into_iter().enumerate() {
        if l.weights.len() != l.width || l.biases.len() != l.width {
            return Err(Error::Parse(format!("layer {k}: inconsistent widths")));
        }
        let mut weights = Vec::with_capacity(l.width * fan_in);
        for row in &l.weights {
            if row.len() != fan_in {
                return Err(Error::Parse(format!(
                    "layer {k}: weight row of len {} vs fan_in {fan_in}",
                    row.len()
                )));
            }
            weights.extend_from_slice(row);
        }
        layers.push(Layer {
            in_dim: fan_in,
            out_dim: l.width,
            activation: l.activation,
            weights,
            biases: l.biases,
        });
        fan_in = l.width;
    }
    DenseNet::from_layers(layers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSeed;

    #[test]
    fn round_trip_preserves_exact_bits() {
        let net = DenseNet::init(
            3,
            &[(7, Activation::Relu), (2, Activation::Sigmoid)],
            RngSeed::new(11, 4),
        )
        .unwrap();
        let text = net_to_json(&net);
        let back = net_from_json(&text).unwrap();
        assert_eq!(net.in_dim(), back.in_dim());
        for (a, b) in net.layers().iter().zip(back.layers()) {
            assert_eq!(a.weights, b.weights);
            assert_eq!(a.biases, b.biases);
            assert_eq!(a.activation, b.activation);
        }
        // And the serialized form itself is stable.
        assert_eq!(text, net_to_json(&back));
    }

    #[test]
    fn rejects_unknown_format_version() {
        let net = DenseNet::init(2, &[(2, Activation::Identity)], RngSeed::new(0, 0)).unwrap();
        let text = net_to_json(&net).replace("\"format_version\": 1", "\"format_version\": 9");
        assert!(matches!(net_from_json(&text), Err(Error::Parse(_))));
    }

    #[test]
    fn rejects_ragged_weight_rows() {
        let text = r#"{"format_version":1,"in_dim":2,"arch":[{"width":1,"activation":"identity","weights":[[1.0,2.0,3.0]],"biases":[0.0]}]}"#;
        assert!(matches!(net_from_json(text), Err(Error::Parse(_))));
    }
}
