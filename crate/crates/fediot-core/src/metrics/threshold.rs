use crate::autoencoder::{forward, mse, Activation, ModelParams};
use crate::error::{Error, Result};
use crate::numeric::Matrix;

/// Per-device anomaly cutoff: mean plus population standard deviation of
/// the benign threshold partition's per-sample reconstruction MSE.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub device_id: usize,
    pub tr: f64,
    pub mse_mean: f64,
    pub mse_std: f64,
}

/// Per-sample reconstruction MSE of each row in `samples`.
pub fn reconstruction_scores(params: &ModelParams, samples: &Matrix, act: Activation) -> Result<Vec<f64>> {
    let recon = forward(params, samples, act)?;
    Ok(mse(&recon, samples)?.0)
}

fn mean_and_population_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Score the benign threshold partition and set `tr = mean + std`.
pub fn compute_threshold(
    device_id: usize,
    params: &ModelParams,
    threshold_benign: &Matrix,
    act: Activation,
) -> Result<Threshold> {
    if threshold_benign.rows() == 0 {
        return Err(Error::config("threshold partition is empty"));
    }
    let scores = reconstruction_scores(params, threshold_benign, act)?;
    let (mse_mean, mse_std) = mean_and_population_std(&scores);
    Ok(Threshold {
        device_id,
        tr: mse_mean + mse_std,
        mse_mean,
        mse_std,
    })
}

/// Label each sample: 1 iff its reconstruction MSE strictly exceeds `tr`.
pub fn classify(params: &ModelParams, tr: f64, samples: &Matrix, act: Activation) -> Result<Vec<u8>> {
    let scores = reconstruction_scores(params, samples, act)?;
    Ok(scores.iter().map(|&s| u8::from(s > tr)).collect())
}
