use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Local optimizer choice. Only SGD with momentum is implemented; the enum
/// keeps the config key explicit and leaves room for alternatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimizer {
    Sgd,
}

/// Server-side weight aggregation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    FedAvg,
    FedAvgM,
}

/// How client parameter vectors are weighted during aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClientWeighting {
    BySampleCount,
    Uniform,
}

/// All federation hyperparameters. Defaults follow the reference setting:
/// 9 clients, 4 selected per round, batch 128, 4 rounds, 10 local and 10
/// retraining epochs, SGD at lr 0.012 / momentum 0.9 / weight decay 1e-5,
/// baseline buffer of 1000 rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FederatedConfig {
    pub num_clients: usize,
    pub num_selected: usize,
    pub batch_size: usize,
    pub baseline_num: usize,
    pub num_rounds: usize,
    pub epochs: usize,
    pub retrain_epochs: usize,
    pub optimizer: Optimizer,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub momentum: f64,
    pub aggregator: Aggregator,
    pub server_momentum_beta: f64,
    pub client_weighting: ClientWeighting,
    pub master_seed: u64,
}

impl Default for FederatedConfig {
    fn default() -> Self {
        FederatedConfig {
            num_clients: 9,
            num_selected: 4,
            batch_size: 128,
            baseline_num: 1000,
            num_rounds: 4,
            epochs: 10,
            retrain_epochs: 10,
            optimizer: Optimizer::Sgd,
            learning_rate: 0.012,
            weight_decay: 1e-5,
            momentum: 0.9,
            aggregator: Aggregator::FedAvg,
            server_momentum_beta: 0.9,
            client_weighting: ClientWeighting::BySampleCount,
            master_seed: 42,
        }
    }
}

impl FederatedConfig {
    /// `num_rounds`, `epochs` and `retrain_epochs` may be zero (degenerate
    /// but well-defined no-op runs); the structural counts may not.
    pub fn validate(&self) -> Result<()> {
        if self.num_clients == 0 {
            return Err(Error::config("num_clients must be at least 1"));
        }
        if self.num_selected == 0 || self.num_selected > self.num_clients {
            return Err(Error::config(format!(
                "num_selected must be in 1..={}, got {}",
                self.num_clients, self.num_selected
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be at least 1"));
        }
        if self.baseline_num == 0 {
            return Err(Error::config("baseline_num must be at least 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("learning_rate must be positive"));
        }
        if self.weight_decay < 0.0 || self.momentum < 0.0 || self.server_momentum_beta < 0.0 {
            return Err(Error::config("rates must be non-negative"));
        }
        Ok(())
    }
}
