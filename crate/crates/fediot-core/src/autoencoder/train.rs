use crate::autoencoder::arch::Activation;
use crate::autoencoder::net::loss_and_grad;
use crate::autoencoder::optim::{sgd_step, OptimizerState};
use crate::autoencoder::params::ModelParams;
use crate::error::{Error, Result};
use crate::numeric::{Matrix, RngStream};

/// Per-epoch mean training MSE, one entry per epoch run.
pub type LossTrace = Vec<f64>;

/// Mini-batch training: rows are reshuffled through `stream` every epoch,
/// full batches first and one final partial batch if the row count is not a
/// multiple of `batch_size`. The reported epoch loss is the mean of the
/// batch losses seen during that epoch.
pub fn train_epochs(
    mut params: ModelParams,
    data: &Matrix,
    epochs: usize,
    batch_size: usize,
    act: Activation,
    opt: &mut OptimizerState,
    stream: &RngStream,
) -> Result<(ModelParams, LossTrace)> {
    if data.rows() == 0 {
        return Err(Error::config("training data is empty"));
    }
    if batch_size == 0 {
        return Err(Error::config("batch_size must be at least 1"));
    }
    let mut rng = stream.rng();
    let mut order: Vec<usize> = (0..data.rows()).collect();
    let mut trace = Vec::with_capacity(epochs);
    for _ in 0..epochs {
        use rand::seq::SliceRandom;
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let mut batches = 0usize;
        for chunk in order.chunks(batch_size) {
            let batch = data.select_rows(chunk);
            let (loss, grad) = loss_and_grad(&params, &batch, act)?;
            sgd_step(&mut params, &grad, opt)?;
            epoch_loss += loss;
            batches += 1;
        }
        trace.push(epoch_loss / batches as f64);
    }
    Ok((params, trace))
}
