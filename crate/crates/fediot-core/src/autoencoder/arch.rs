use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hidden-layer activation. The output layer is always linear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
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
        }
    }

    /// Derivative as a function of the pre-activation value. The ReLU
    /// subgradient at exactly zero is taken as zero.
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
        }
    }
}

/// Shape of the symmetric deep autoencoder.
///
/// The encoder compresses `input_dim` through one layer per ratio, each
/// layer `max(1, round(ratio * input_dim))` units wide; the decoder mirrors
/// the encoder exactly back to `input_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureSpec {
    pub input_dim: usize,
    pub encoder_ratios: Vec<f64>,
    pub hidden_activation: Activation,
}

impl ArchitectureSpec {
    pub const DEFAULT_RATIOS: [f64; 4] = [0.75, 0.50, 0.33, 0.25];

    pub fn new(input_dim: usize, encoder_ratios: Vec<f64>, hidden_activation: Activation) -> Result<Self> {
        if input_dim == 0 {
            return Err(Error::config("input_dim must be at least 1"));
        }
        if encoder_ratios.is_empty() {
            return Err(Error::config("encoder_ratios must not be empty"));
        }
        let mut prev = f64::INFINITY;
        for &r in &encoder_ratios {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::config(format!("encoder ratio {r} outside (0, 1]")));
            }
            if r >= prev {
                return Err(Error::config("encoder ratios must be strictly decreasing"));
            }
            prev = r;
        }
        Ok(ArchitectureSpec {
            input_dim,
            encoder_ratios,
            hidden_activation,
        })
    }

    /// Default compression ladder with ReLU hidden activations.
    pub fn with_defaults(input_dim: usize) -> Result<Self> {
        Self::new(input_dim, Self::DEFAULT_RATIOS.to_vec(), Activation::Relu)
    }

    /// Full width ladder, input through bottleneck and back:
    /// `[d, w1, .., wL, w(L-1), .., w1, d]`.
    pub fn layer_widths(&self) -> Vec<usize> {
        let encoder: Vec<usize> = self
            .encoder_ratios
            .iter()
            .map(|r| ((r * self.input_dim as f64).round() as usize).max(1))
            .collect();
        let mut widths = Vec::with_capacity(2 * encoder.len() + 1);
        widths.push(self.input_dim);
        widths.extend(&encoder);
        widths.extend(encoder.iter().rev().skip(1));
        widths.push(self.input_dim);
        widths
    }

    /// Number of weight layers (encoder plus decoder).
    pub fn num_layers(&self) -> usize {
        2 * self.encoder_ratios.len()
    }
}
