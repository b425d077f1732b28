//! The local model: a symmetric deep autoencoder trained by mini-batch SGD
//! with momentum and weight decay to minimize reconstruction MSE.

mod arch;
mod net;
mod optim;
mod train;
mod params;

pub use arch::{Activation, ArchitectureSpec};
pub use net::{backward, forward, loss_and_grad, mse};
pub use optim::{sgd_step, OptimizerState};
pub use params::{LayerParams, ModelParams};
pub use train::{train_epochs, LossTrace};
