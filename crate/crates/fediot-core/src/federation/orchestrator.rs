//! The global model: communication rounds of partial client selection,
//! local training, aggregation, server-side retraining and broadcast.
//!
//! Determinism contract: every random choice is derived from
//! `(master_seed, purpose, client, round)`, never from execution order, so
//! sequential and parallel client training produce bit-identical results.

use std::time::Instant;

use rayon::prelude::*;

use crate::autoencoder::{
    train_epochs, ArchitectureSpec, LossTrace, ModelParams, OptimizerState,
};
use crate::data::DeviceDataset;
use crate::error::{Error, Result};
use crate::federation::aggregate::{fedavg, fedavgm};
use crate::federation::config::{Aggregator, FederatedConfig};
use crate::numeric::{Matrix, Purpose, RngStream, StreamLabel};

/// One simulated device: its prepared data and the model it currently holds.
#[derive(Debug, Clone)]
pub struct ClientState {
    pub device_id: usize,
    pub dataset: DeviceDataset,
    pub params: ModelParams,
    pub optimizer: OptimizerState,
}

/// Server-side state across rounds.
#[derive(Debug, Clone)]
pub struct ServerState {
    pub global: ModelParams,
    /// FedAvgM velocity; present iff the aggregator is FedAvgM.
    pub momentum: Option<ModelParams>,
    /// Standardized benign rows sampled from every device's training data.
    pub baseline_buffer: Matrix,
    /// Per-round retraining error sum divided by the selected-client count.
    pub retrain_error_log: Vec<f64>,
}

/// What one communication round did.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RoundLog {
    pub round: usize,
    pub selected: Vec<usize>,
    /// `(device_id, final local training loss)` per selected client.
    pub client_losses: Vec<(usize, f64)>,
    pub retrain_trace: LossTrace,
    pub retrain_avg_error: f64,
    pub wall_time_sec: f64,
}

/// Result of a full federation run.
#[derive(Debug, Clone)]
pub struct FederationRun {
    pub final_params: ModelParams,
    pub rounds: Vec<RoundLog>,
    pub retrain_error_log: Vec<f64>,
    pub wall_time_sec: f64,
}

/// Whether selected clients train one-by-one or concurrently. Results are
/// identical either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecutionMode {
    Sequential,
    Parallel,
}

/// Uniform sample of `num_selected` distinct client indices, sorted.
pub fn select_clients(num_clients: usize, num_selected: usize, stream: &RngStream) -> Result<Vec<usize>> {
    if num_selected > num_clients {
        return Err(Error::config(format!(
            "cannot select {num_selected} of {num_clients} clients"
        )));
    }
    let mut selected = stream.permutation(num_clients);
    selected.truncate(num_selected);
    selected.sort_unstable();
    Ok(selected)
}

/// Outcome of one client's local training pass.
#[derive(Debug, Clone)]
pub struct LocalTrainOutcome {
    pub params: ModelParams,
    pub optimizer: OptimizerState,
    pub sample_count: usize,
    /// Last epoch's mean loss; 0 when no epochs were run.
    pub final_loss: f64,
}

/// Copy the global parameters into the client, reset its momentum buffers
/// and train on the client's benign training partition.
pub fn local_train(
    client: &ClientState,
    global: &ModelParams,
    cfg: &FederatedConfig,
    arch: &ArchitectureSpec,
    stream: &RngStream,
) -> Result<LocalTrainOutcome> {
    let mut optimizer = OptimizerState::new(cfg.learning_rate, cfg.momentum, cfg.weight_decay, global);
    let (params, trace) = train_epochs(
        global.clone(),
        &client.dataset.train_benign,
        cfg.epochs,
        cfg.batch_size,
        arch.hidden_activation,
        &mut optimizer,
        stream,
    )?;
    Ok(LocalTrainOutcome {
        params,
        optimizer,
        sample_count: client.dataset.train_benign.rows(),
        final_loss: trace.last().copied().unwrap_or(0.0),
    })
}

/// Sample `ceil(baseline_num / num_devices)` rows without replacement from
/// each device's training partition (capped at availability), concatenate in
/// device order and truncate to `baseline_num` rows.
pub fn build_baseline_buffer(
    datasets: &[DeviceDataset],
    baseline_num: usize,
    stream: &RngStream,
) -> Result<Matrix> {
    if datasets.is_empty() {
        return Err(Error::config("no devices to sample a baseline buffer from"));
    }
    let per_device = baseline_num.div_ceil(datasets.len());
    let mut rng = stream.rng();
    let mut parts: Vec<Matrix> = Vec::with_capacity(datasets.len());
    for ds in datasets {
        use rand::seq::SliceRandom;
        let mut indices: Vec<usize> = (0..ds.train_benign.rows()).collect();
        indices.shuffle(&mut rng);
        indices.truncate(per_device);
        parts.push(ds.train_benign.select_rows(&indices));
    }
    let refs: Vec<&Matrix> = parts.iter().collect();
    let stacked = Matrix::vstack(&refs)?;
    let keep: Vec<usize> = (0..stacked.rows().min(baseline_num)).collect();
    Ok(stacked.select_rows(&keep))
}

/// Retrain the freshly aggregated global model on the baseline buffer with a
/// fresh optimizer. The logged average error is the sum of per-epoch
/// retraining losses divided by the number of selected clients.
pub fn retrain(
    server: &mut ServerState,
    cfg: &FederatedConfig,
    arch: &ArchitectureSpec,
    stream: &RngStream,
) -> Result<(LossTrace, f64)> {
    if server.baseline_buffer.rows() == 0 {
        log::warn!("baseline buffer is empty; skipping retraining");
        server.retrain_error_log.push(0.0);
        return Ok((Vec::new(), 0.0));
    }
    let mut optimizer = OptimizerState::new(
        cfg.learning_rate,
        cfg.momentum,
        cfg.weight_decay,
        &server.global,
    );
    let (params, trace) = train_epochs(
        server.global.clone(),
        &server.baseline_buffer,
        cfg.retrain_epochs,
        cfg.batch_size,
        arch.hidden_activation,
        &mut optimizer,
        stream,
    )?;
    let avg_error = trace.iter().sum::<f64>() / cfg.num_selected as f64;
    server.global = params;
    server.retrain_error_log.push(avg_error);
    Ok((trace, avg_error))
}

fn check_datasets(cfg: &FederatedConfig, arch: &ArchitectureSpec, datasets: &[DeviceDataset]) -> Result<()> {
    if datasets.len() != cfg.num_clients {
        return Err(Error::config(format!(
            "config expects {} clients, got {} datasets",
            cfg.num_clients,
            datasets.len()
        )));
    }
    for ds in datasets {
        if ds.feature_dim() != arch.input_dim {
            return Err(Error::config(format!(
                "device {} has {} features, architecture expects {}",
                ds.device_id,
                ds.feature_dim(),
                arch.input_dim
            )));
        }
        if ds.train_benign.rows() == 0 {
            return Err(Error::config(format!("device {} has no training rows", ds.device_id)));
        }
    }
    Ok(())
}

/// Run the full federation: for each round, select clients, train them from
/// the current global model, aggregate (FedAvg, plus server momentum for
/// FedAvgM), retrain on the baseline buffer and broadcast to all clients.
pub fn run_federation(
    cfg: &FederatedConfig,
    arch: &ArchitectureSpec,
    datasets: &[DeviceDataset],
    mode: ExecutionMode,
) -> Result<FederationRun> {
    cfg.validate()?;
    check_datasets(cfg, arch, datasets)?;
    let started = Instant::now();
    let seed = cfg.master_seed;
    let stream = |purpose, client: usize, round: usize| {
        RngStream::new(seed, StreamLabel::new(purpose, client as u64, round as u64))
    };

    let global = ModelParams::init(arch, &stream(Purpose::Init, 0, 0));
    let baseline_buffer = build_baseline_buffer(datasets, cfg.baseline_num, &stream(Purpose::Baseline, 0, 0))?;
    let mut server = ServerState {
        momentum: (cfg.aggregator == Aggregator::FedAvgM).then(|| global.zeros_like()),
        global,
        baseline_buffer,
        retrain_error_log: Vec::with_capacity(cfg.num_rounds),
    };
    let mut clients: Vec<ClientState> = datasets
        .iter()
        .map(|ds| ClientState {
            device_id: ds.device_id,
            dataset: ds.clone(),
            params: server.global.clone(),
            optimizer: OptimizerState::new(cfg.learning_rate, cfg.momentum, cfg.weight_decay, &server.global),
        })
        .collect();

    let mut rounds = Vec::with_capacity(cfg.num_rounds);
    for round in 1..=cfg.num_rounds {
        let round_started = Instant::now();
        let selected = select_clients(cfg.num_clients, cfg.num_selected, &stream(Purpose::Select, 0, round))?;

        let train_one = |&client_idx: &usize| {
            local_train(
                &clients[client_idx],
                &server.global,
                cfg,
                arch,
                &stream(Purpose::TrainShuffle, client_idx, round),
            )
        };
        let outcomes: Vec<LocalTrainOutcome> = match mode {
            ExecutionMode::Sequential => selected.iter().map(train_one).collect::<Result<_>>()?,
            ExecutionMode::Parallel => selected.par_iter().map(train_one).collect::<Result<_>>()?,
        };

        let sample_counts: Vec<usize> = outcomes.iter().map(|o| o.sample_count).collect();
        let client_losses: Vec<(usize, f64)> = selected
            .iter()
            .zip(&outcomes)
            .map(|(&idx, o)| (idx, o.final_loss))
            .collect();
        let client_params: Vec<ModelParams> = outcomes.iter().map(|o| o.params.clone()).collect();
        let round_mean = fedavg(&client_params, &sample_counts, cfg.client_weighting)?;
        server.global = match cfg.aggregator {
            Aggregator::FedAvg => round_mean,
            Aggregator::FedAvgM => {
                let velocity = server
                    .momentum
                    .as_mut()
                    .ok_or_else(|| Error::config("fedavgm requires a server momentum buffer"))?;
                fedavgm(&server.global, &round_mean, velocity, cfg.server_momentum_beta)?
            }
        };

        let (retrain_trace, retrain_avg_error) =
            retrain(&mut server, cfg, arch, &stream(Purpose::Retrain, 0, round))?;

        // Keep the selected clients' optimizer states, then broadcast the
        // aggregated model to every device.
        for (&idx, outcome) in selected.iter().zip(outcomes) {
            clients[idx].optimizer = outcome.optimizer;
        }
        for client in &mut clients {
            client.params = server.global.clone();
        }

        rounds.push(RoundLog {
            round,
            selected,
            client_losses,
            retrain_trace,
            retrain_avg_error,
            wall_time_sec: round_started.elapsed().as_secs_f64(),
        });
    }

    Ok(FederationRun {
        final_params: server.global,
        retrain_error_log: server.retrain_error_log,
        rounds,
        wall_time_sec: started.elapsed().as_secs_f64(),
    })
}
