use crate::autoencoder::params::ModelParams;
use crate::error::{Error, Result};

/// Classical SGD with momentum and L2 weight decay folded into the gradient.
///
/// Per coordinate: `g' = g + weight_decay * p`, `buf = momentum * buf + g'`,
/// `p = p - lr * buf`.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub learning_rate: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    buffers: ModelParams,
}

impl OptimizerState {
    /// Fresh state with zero momentum buffers shaped like `params`.
    pub fn new(learning_rate: f64, momentum: f64, weight_decay: f64, params: &ModelParams) -> Self {
        OptimizerState {
            learning_rate,
            momentum,
            weight_decay,
            buffers: params.zeros_like(),
        }
    }

    pub fn buffers(&self) -> &ModelParams {
        &self.buffers
    }
}

pub fn sgd_step(params: &mut ModelParams, grad: &ModelParams, state: &mut OptimizerState) -> Result<()> {
    if !params.same_shape(grad) || !params.same_shape(&state.buffers) {
        return Err(Error::config("sgd_step shape mismatch"));
    }
    let (lr, mu, wd) = (state.learning_rate, state.momentum, state.weight_decay);
    for (layer, (g_layer, b_layer)) in params
        .layers
        .iter_mut()
        .zip(grad.layers.iter().zip(state.buffers.layers.iter_mut()))
    {
        for ((p, &g), buf) in layer
            .weight
            .data_mut()
            .iter_mut()
            .zip(g_layer.weight.data())
            .zip(b_layer.weight.data_mut())
        {
            let g = g + wd * *p;
            *buf = mu * *buf + g;
            *p -= lr * *buf;
        }
        for ((p, &g), buf) in layer
            .bias
            .iter_mut()
            .zip(&g_layer.bias)
            .zip(b_layer.bias.iter_mut())
        {
            let g = g + wd * *p;
            *buf = mu * *buf + g;
            *p -= lr * *buf;
        }
    }
    Ok(())
}
