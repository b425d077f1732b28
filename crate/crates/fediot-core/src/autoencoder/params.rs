use rand::Rng;

use crate::autoencoder::arch::ArchitectureSpec;
use crate::error::{Error, Result};
use crate::numeric::{Matrix, RngStream};

/// One dense layer: weight of shape `out x in`, bias of length `out`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

/// The full parameter set of one autoencoder, the unit exchanged between
/// clients and server. The canonical flat order is layer-major, weights
/// (row-major) before bias within each layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub layers: Vec<LayerParams>,
}

impl ModelParams {
    /// Glorot-uniform weights, zero biases, deterministic given the stream.
    pub fn init(spec: &ArchitectureSpec, stream: &RngStream) -> ModelParams {
        let widths = spec.layer_widths();
        let mut rng = stream.rng();
        let layers = widths
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let data = (0..fan_in * fan_out)
                    .map(|_| (2.0 * rng.random::<f64>() - 1.0) * limit)
                    .collect();
                LayerParams {
                    weight: Matrix::new(fan_out, fan_in, data).expect("widths are consistent"),
                    bias: vec![0.0; fan_out],
                }
            })
            .collect();
        ModelParams { layers }
    }

    pub fn zeros(spec: &ArchitectureSpec) -> ModelParams {
        let widths = spec.layer_widths();
        let layers = widths
            .windows(2)
            .map(|w| LayerParams {
                weight: Matrix::zeros(w[1], w[0]),
                bias: vec![0.0; w[1]],
            })
            .collect();
        ModelParams { layers }
    }

    pub fn zeros_like(&self) -> ModelParams {
        let layers = self
            .layers
            .iter()
            .map(|l| LayerParams {
                weight: Matrix::zeros(l.weight.rows(), l.weight.cols()),
                bias: vec![0.0; l.bias.len()],
            })
            .collect();
        ModelParams { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.weight.cols())
    }

    pub fn num_values(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weight.data().len() + l.bias.len())
            .sum()
    }

    pub fn same_shape(&self, other: &ModelParams) -> bool {
        self.layers.len() == other.layers.len()
            && self.layers.iter().zip(&other.layers).all(|(a, b)| {
                a.weight.rows() == b.weight.rows()
                    && a.weight.cols() == b.weight.cols()
                    && a.bias.len() == b.bias.len()
            })
    }

    /// Canonical flattening: layer-major, weights before bias, row-major.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.num_values());
        for layer in &self.layers {
            flat.extend_from_slice(layer.weight.data());
            flat.extend_from_slice(&layer.bias);
        }
        flat
    }

    /// Inverse of [`flatten`](Self::flatten) for the given architecture.
    pub fn unflatten(spec: &ArchitectureSpec, flat: &[f64]) -> Result<ModelParams> {
        let widths = spec.layer_widths();
        let expected: usize = widths.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        if flat.len() != expected {
            return Err(Error::config(format!(
                "flat parameter vector has length {}, architecture needs {}",
                flat.len(),
                expected
            )));
        }
        let mut offset = 0;
        let layers = widths
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let wlen = fan_in * fan_out;
                let weight =
                    Matrix::new(fan_out, fan_in, flat[offset..offset + wlen].to_vec()).expect("sized above");
                offset += wlen;
                let bias = flat[offset..offset + fan_out].to_vec();
                offset += fan_out;
                LayerParams { weight, bias }
            })
            .collect();
        Ok(ModelParams { layers })
    }

    /// In-place `self += c * other`. Shapes must match.
    pub fn add_scaled(&mut self, other: &ModelParams, c: f64) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::config("parameter shape mismatch"));
        }
        for (dst, src) in self.layers.iter_mut().zip(&other.layers) {
            for (d, s) in dst.weight.data_mut().iter_mut().zip(src.weight.data()) {
                *d += c * s;
            }
            for (d, s) in dst.bias.iter_mut().zip(&src.bias) {
                *d += c * s;
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, c: f64) {
        for layer in &mut self.layers {
            for v in layer.weight.data_mut() {
                *v *= c;
            }
            for v in &mut layer.bias {
                *v *= c;
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weight.is_finite() && l.bias.iter().all(|v| v.is_finite()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoencoder::arch::Activation;
    use crate::numeric::{Purpose, StreamLabel};

    fn stream(seed: u64) -> RngStream {
        RngStream::new(seed, StreamLabel::new(Purpose::Init, 0, 0))
    }

    #[test]
    fn fresh_biases_are_exactly_zero() {
        let spec = ArchitectureSpec::with_defaults(12).unwrap();
        let params = ModelParams::init(&spec, &stream(3));
        for layer in &params.layers {
            assert!(layer.bias.iter().all(|&b| b == 0.0));
        }
    }

    #[test]
    fn init_is_bit_deterministic() {
        let spec = ArchitectureSpec::with_defaults(10).unwrap();
        let a = ModelParams::init(&spec, &stream(9));
        let b = ModelParams::init(&spec, &stream(9));
        assert_eq!(a, b);
    }

    #[test]
    fn glorot_bound_holds_for_10_to_5_layer() {
        let spec = ArchitectureSpec::new(10, vec![0.5], Activation::Relu).unwrap();
        let params = ModelParams::init(&spec, &stream(1));
        let limit = (6.0f64 / 15.0).sqrt();
        let first = &params.layers[0];
        assert_eq!(first.weight.rows(), 5);
        assert_eq!(first.weight.cols(), 10);
        for &w in first.weight.data() {
            assert!(w.abs() <= limit, "weight {w} outside +-{limit}");
        }
    }

    #[test]
    fn flatten_unflatten_roundtrip() {
        let spec = ArchitectureSpec::with_defaults(7).unwrap();
        let params = ModelParams::init(&spec, &stream(4));
        let flat = params.flatten();
        assert_eq!(flat.len(), params.num_values());
        let back = ModelParams::unflatten(&spec, &flat).unwrap();
        assert_eq!(params, back);
    }

    #[test]
    fn unflatten_rejects_wrong_length() {
        let spec = ArchitectureSpec::with_defaults(7).unwrap();
        let err = ModelParams::unflatten(&spec, &[0.0; 3]);
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn add_scaled_and_scale() {
        let spec = ArchitectureSpec::new(4, vec![0.5], Activation::Relu).unwrap();
        let mut a = ModelParams::init(&spec, &stream(1));
        let b = ModelParams::init(&spec, &stream(2));
        let before = a.flatten();
        a.add_scaled(&b, 2.0).unwrap();
        a.scale(0.5);
        for ((got, orig), other) in a.flatten().iter().zip(&before).zip(b.flatten()) {
            assert!((got - (orig + 2.0 * other) * 0.5).abs() < 1e-15);
        }
    }
}
