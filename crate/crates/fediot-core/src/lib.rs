//! Federated autoencoder anomaly detection for IoT network traffic.
//!
//! The crate simulates, in-process and fully deterministically, a fleet of
//! IoT devices that collaboratively train a deep autoencoder on their own
//! benign traffic and detect botnet attacks by reconstruction error:
//!
//! * [`numeric`] — dense `f64` matrices and label-derived randomness.
//! * [`autoencoder`] — the symmetric autoencoder local model and its
//!   SGD-with-momentum training loop.
//! * [`data`] — CSV ingestion, cleaning, benign three-way splitting,
//!   standardization and a synthetic non-IID traffic generator.
//! * [`federation`] — communication rounds with partial client selection,
//!   FedAvg / FedAvgM aggregation and server-side retraining.
//! * [`metrics`] — reconstruction-error thresholding and the binary
//!   detection metric suite (accuracy through AUC).
//!
//! Every source of randomness flows through [`numeric::RngStream`], so a
//! whole experiment is reproducible from a single master seed.

pub mod autoencoder;
pub mod data;
pub mod error;
pub mod federation;
pub mod metrics;
pub mod numeric;

pub use error::{Error, Result};
