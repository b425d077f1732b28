//! Dense matrix arithmetic and deterministic randomness.

mod matrix;
mod rng;

pub use matrix::Matrix;
pub use rng::{Purpose, RngStream, StreamLabel};
