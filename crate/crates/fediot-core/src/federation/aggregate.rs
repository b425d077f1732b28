use crate::autoencoder::ModelParams;
use crate::error::{Error, Result};
use crate::federation::config::ClientWeighting;

/// Coordinate-wise weighted mean of client parameter vectors.
///
/// Weights are the clients' training sample counts, normalized, or `1/k`
/// under uniform weighting. The result is a convex combination, so every
/// coordinate stays within the clients' min/max envelope.
pub fn fedavg(
    params: &[ModelParams],
    sample_counts: &[usize],
    weighting: ClientWeighting,
) -> Result<ModelParams> {
    if params.is_empty() {
        return Err(Error::config("fedavg over an empty client list"));
    }
    if params.len() != sample_counts.len() {
        return Err(Error::config("fedavg weight count does not match client count"));
    }
    for p in &params[1..] {
        if !params[0].same_shape(p) {
            return Err(Error::config("fedavg client parameter shapes differ"));
        }
    }
    let weights: Vec<f64> = match weighting {
        ClientWeighting::Uniform => vec![1.0 / params.len() as f64; params.len()],
        ClientWeighting::BySampleCount => {
            let total: usize = sample_counts.iter().sum();
            if total == 0 {
                return Err(Error::config("fedavg sample counts sum to zero"));
            }
            sample_counts.iter().map(|&c| c as f64 / total as f64).collect()
        }
    };
    let mut mean = params[0].zeros_like();
    for (p, &w) in params.iter().zip(&weights) {
        mean.add_scaled(p, w)?;
    }
    Ok(mean)
}

/// Server momentum over the round's pseudo-gradient.
///
/// With `delta = global - round_mean`, the velocity update is
/// `v <- beta * v + delta` and the new global is `global - v`, evaluated as
/// `round_mean - beta * v_prev` (the same value, grouped so that `beta = 0`
/// reproduces plain FedAvg bit-for-bit).
pub fn fedavgm(
    global: &ModelParams,
    round_mean: &ModelParams,
    velocity: &mut ModelParams,
    beta: f64,
) -> Result<ModelParams> {
    if !global.same_shape(round_mean) || !global.same_shape(velocity) {
        return Err(Error::config("fedavgm parameter shapes differ"));
    }
    let mut next = round_mean.clone();
    for ((next_l, (g_l, m_l)), v_l) in next
        .layers
        .iter_mut()
        .zip(global.layers.iter().zip(round_mean.layers.iter()))
        .zip(velocity.layers.iter_mut())
    {
        let it = next_l
            .weight
            .data_mut()
            .iter_mut()
            .zip(g_l.weight.data().iter().zip(m_l.weight.data()))
            .zip(v_l.weight.data_mut())
            .chain(
                next_l
                    .bias
                    .iter_mut()
                    .zip(g_l.bias.iter().zip(m_l.bias.iter()))
                    .zip(v_l.bias.iter_mut()),
            );
        for ((out, (&g, &m)), v) in it {
            let v_prev = *v;
            *v = beta * v_prev + (g - m);
            *out = m - beta * v_prev;
        }
    }
    Ok(next)
}
