//! Forward pass, reconstruction loss and exact backpropagation.
//!
//! The loss is the mean over samples of the per-sample mean squared
//! reconstruction error, so batch gradients are means of per-row gradients.
//! Weight decay is not part of the loss here; the optimizer folds it in.

use crate::autoencoder::arch::Activation;
use crate::autoencoder::params::ModelParams;
use crate::error::{Error, Result};
use crate::numeric::Matrix;

fn check_input(params: &ModelParams, batch: &Matrix) -> Result<()> {
    if params.layers.is_empty() {
        return Err(Error::config("model has no layers"));
    }
    if batch.cols() != params.input_dim() {
        return Err(Error::config(format!(
            "batch has {} features, model expects {}",
            batch.cols(),
            params.input_dim()
        )));
    }
    Ok(())
}

/// Activations and pre-activations for every layer, kept for backprop.
struct ForwardTrace {
    /// `activations[0]` is the input batch, `activations[l+1]` the output of
    /// layer `l` after its activation.
    activations: Vec<Matrix>,
    pre_activations: Vec<Matrix>,
}

fn forward_trace(params: &ModelParams, batch: &Matrix, act: Activation) -> Result<ForwardTrace> {
    let num_layers = params.layers.len();
    let mut activations = Vec::with_capacity(num_layers + 1);
    let mut pre_activations = Vec::with_capacity(num_layers);
    activations.push(batch.clone());
    for (l, layer) in params.layers.iter().enumerate() {
        let mut z = activations[l].matmul_nt(&layer.weight)?;
        for r in 0..z.rows() {
            let row = &mut z.data_mut()[r * layer.bias.len()..(r + 1) * layer.bias.len()];
            for (v, b) in row.iter_mut().zip(&layer.bias) {
                *v += b;
            }
        }
        let is_output = l + 1 == num_layers;
        let a = if is_output {
            z.clone()
        } else {
            let mut a = z.clone();
            for v in a.data_mut() {
                *v = act.apply(*v);
            }
            a
        };
        pre_activations.push(z);
        activations.push(a);
    }
    Ok(ForwardTrace {
        activations,
        pre_activations,
    })
}

/// Reconstruct a batch: linear output layer, hidden activation elsewhere.
pub fn forward(params: &ModelParams, batch: &Matrix, act: Activation) -> Result<Matrix> {
    check_input(params, batch)?;
    let trace = forward_trace(params, batch, act)?;
    Ok(trace.activations.into_iter().next_back().expect("nonempty"))
}

/// Per-sample reconstruction MSE (mean over features of squared residuals)
/// and its average over the batch.
pub fn mse(recon: &Matrix, batch: &Matrix) -> Result<(Vec<f64>, f64)> {
    if recon.rows() != batch.rows() || recon.cols() != batch.cols() {
        return Err(Error::config("mse shape mismatch"));
    }
    if recon.rows() == 0 {
        return Err(Error::config("mse of an empty batch"));
    }
    let d = recon.cols() as f64;
    let per_sample: Vec<f64> = (0..recon.rows())
        .map(|r| {
            recon
                .row(r)
                .iter()
                .zip(batch.row(r))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                / d
        })
        .collect();
    let mean = per_sample.iter().sum::<f64>() / per_sample.len() as f64;
    Ok((per_sample, mean))
}

/// Mean reconstruction MSE over the batch and its exact gradient with
/// respect to every parameter.
pub fn loss_and_grad(params: &ModelParams, batch: &Matrix, act: Activation) -> Result<(f64, ModelParams)> {
    check_input(params, batch)?;
    if batch.rows() == 0 {
        return Err(Error::config("gradient of an empty batch"));
    }
    let trace = forward_trace(params, batch, act)?;
    let recon = trace.activations.last().expect("nonempty");
    let (_, loss) = mse(recon, batch)?;

    let n = batch.rows() as f64;
    let d = batch.cols() as f64;
    let num_layers = params.layers.len();

    // dL/d(recon): output layer is linear, so this is the first delta.
    let mut delta = Matrix::zeros(batch.rows(), batch.cols());
    {
        let scale = 2.0 / (n * d);
        let dst = delta.data_mut();
        for (o, (r, x)) in dst.iter_mut().zip(recon.data().iter().zip(batch.data())) {
            *o = scale * (r - x);
        }
    }

    let mut grad_layers = vec![None; num_layers];
    for l in (0..num_layers).rev() {
        let input = &trace.activations[l];
        let grad_w = delta.matmul_tn(input)?;
        let mut grad_b = vec![0.0; delta.cols()];
        for r in 0..delta.rows() {
            for (g, v) in grad_b.iter_mut().zip(delta.row(r)) {
                *g += v;
            }
        }
        grad_layers[l] = Some(crate::autoencoder::params::LayerParams {
            weight: grad_w,
            bias: grad_b,
        });
        if l > 0 {
            let mut upstream = delta.matmul(&params.layers[l].weight)?;
            let pre = &trace.pre_activations[l - 1];
            for (u, z) in upstream.data_mut().iter_mut().zip(pre.data()) {
                *u *= act.derivative(*z);
            }
            delta = upstream;
        }
    }

    let grad = ModelParams {
        layers: grad_layers.into_iter().map(|g| g.expect("filled")).collect(),
    };
    Ok((loss, grad))
}

/// Gradient of the mean batch MSE with respect to every parameter.
pub fn backward(params: &ModelParams, batch: &Matrix, act: Activation) -> Result<ModelParams> {
    loss_and_grad(params, batch, act).map(|(_, g)| g)
}
