//! Communication rounds: partial client selection, local training, FedAvg /
//! FedAvgM aggregation, server-side retraining and broadcast.

mod aggregate;
mod config;
mod orchestrator;

pub use aggregate::{fedavg, fedavgm};
pub use config::{Aggregator, ClientWeighting, FederatedConfig, Optimizer};
pub use orchestrator::{
    build_baseline_buffer, local_train, retrain, run_federation, select_clients, ClientState,
    ExecutionMode, FederationRun, LocalTrainOutcome, RoundLog, ServerState,
};
