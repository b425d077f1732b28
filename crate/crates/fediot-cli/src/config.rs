//! Experiment configuration: a flat TOML file whose keys mirror the
//! federation hyperparameter set one-for-one, plus architecture, data source
//! and output settings. Every field is optional; the resolved configuration
//! (all defaults applied) is echoed next to each run's reports so any run is
//! reproducible from its output directory alone.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use fediot_core::autoencoder::{Activation, ArchitectureSpec};
use fediot_core::data::SynthConfig;
use fediot_core::federation::{Aggregator, ClientWeighting, FederatedConfig, Optimizer};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub num_clients: Option<usize>,
    pub num_selected: Option<usize>,
    pub batch_size: Option<usize>,
    pub baseline_num: Option<usize>,
    pub num_rounds: Option<usize>,
    pub epochs: Option<usize>,
    pub retrain_epochs: Option<usize>,
    pub optimizer: Option<Optimizer>,
    pub learning_rate: Option<f64>,
    pub weight_decay: Option<f64>,
    pub momentum: Option<f64>,
    pub aggregator: Option<Aggregator>,
    pub server_momentum_beta: Option<f64>,
    pub client_weighting: Option<ClientWeighting>,
    pub seed: Option<u64>,
    pub anomaly_mix_ratio: Option<f64>,
    pub encoder_ratios: Option<Vec<f64>>,
    pub hidden_activation: Option<Activation>,
    pub out_dir: Option<PathBuf>,
    pub data: Option<DataSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum DataSection {
    Synth(SynthSection),
    Csv(CsvSection),
}

/// Synthetic-data overrides; unset fields fall back to the generator
/// defaults, and the generator seed falls back to the experiment seed.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub num_devices: Option<usize>,
    pub feature_dim: Option<usize>,
    pub benign_rows: Option<Vec<usize>>,
    pub anomaly_rows: Option<Vec<usize>>,
    pub manifold_rank: Option<usize>,
    pub noise_scale: Option<f64>,
    pub anomaly_shift_scale: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvSection {
    /// Device CSV paths: either one literal path or a pattern with a single
    /// `*`; matches are read in lexicographic order, one device per file.
    pub pattern: String,
    #[serde(default)]
    pub drop_id_column: bool,
}

/// Data source with every default applied.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum ResolvedData {
    Synth(SynthConfig),
    Csv(CsvSection),
}

/// The fully resolved experiment: what actually runs.
#[derive(Debug, Clone)]
pub struct ResolvedExperiment {
    pub fed: FederatedConfig,
    pub encoder_ratios: Vec<f64>,
    pub hidden_activation: Activation,
    pub anomaly_mix_ratio: f64,
    pub out_dir: PathBuf,
    pub data: ResolvedData,
}

impl ExperimentFile {
    pub fn load(path: &Path) -> Result<ExperimentFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    /// Apply defaults and the optional CLI overrides.
    pub fn resolve(
        self,
        seed_override: Option<u64>,
        out_override: Option<PathBuf>,
    ) -> Result<ResolvedExperiment, CliError> {
        let defaults = FederatedConfig::default();
        let master_seed = seed_override.or(self.seed).unwrap_or(defaults.master_seed);
        let fed = FederatedConfig {
            num_clients: self.num_clients.unwrap_or(defaults.num_clients),
            num_selected: self.num_selected.unwrap_or(defaults.num_selected),
            batch_size: self.batch_size.unwrap_or(defaults.batch_size),
            baseline_num: self.baseline_num.unwrap_or(defaults.baseline_num),
            num_rounds: self.num_rounds.unwrap_or(defaults.num_rounds),
            epochs: self.epochs.unwrap_or(defaults.epochs),
            retrain_epochs: self.retrain_epochs.unwrap_or(defaults.retrain_epochs),
            optimizer: self.optimizer.unwrap_or(defaults.optimizer),
            learning_rate: self.learning_rate.unwrap_or(defaults.learning_rate),
            weight_decay: self.weight_decay.unwrap_or(defaults.weight_decay),
            momentum: self.momentum.unwrap_or(defaults.momentum),
            aggregator: self.aggregator.unwrap_or(defaults.aggregator),
            server_momentum_beta: self.server_momentum_beta.unwrap_or(defaults.server_momentum_beta),
            client_weighting: self.client_weighting.unwrap_or(defaults.client_weighting),
            master_seed,
        };
        fed.validate()?;

        let encoder_ratios = self
            .encoder_ratios
            .unwrap_or_else(|| ArchitectureSpec::DEFAULT_RATIOS.to_vec());
        let hidden_activation = self.hidden_activation.unwrap_or(Activation::Relu);
        let anomaly_mix_ratio = self
            .anomaly_mix_ratio
            .unwrap_or(fediot_core::data::DEFAULT_ANOMALY_MIX_RATIO);
        if anomaly_mix_ratio <= 0.0 {
            return Err(CliError::Config("anomaly_mix_ratio must be positive".into()));
        }

        let data = match self.data {
            None => ResolvedData::Synth(resolve_synth(SynthSection::default(), master_seed)),
            Some(DataSection::Synth(s)) => ResolvedData::Synth(resolve_synth(s, master_seed)),
            Some(DataSection::Csv(c)) => {
                if c.pattern.trim().is_empty() {
                    return Err(CliError::Config("data.pattern must not be empty".into()));
                }
                ResolvedData::Csv(c)
            }
        };
        if let ResolvedData::Synth(s) = &data {
            s.validate()?;
        }

        Ok(ResolvedExperiment {
            fed,
            encoder_ratios,
            hidden_activation,
            anomaly_mix_ratio,
            out_dir: out_override.or(self.out_dir).unwrap_or_else(|| PathBuf::from("out")),
            data,
        })
    }
}

fn resolve_synth(section: SynthSection, master_seed: u64) -> SynthConfig {
    let d = SynthConfig::default();
    SynthConfig {
        num_devices: section.num_devices.unwrap_or(d.num_devices),
        feature_dim: section.feature_dim.unwrap_or(d.feature_dim),
        benign_rows: section.benign_rows.unwrap_or(d.benign_rows),
        anomaly_rows: section.anomaly_rows.unwrap_or(d.anomaly_rows),
        manifold_rank: section.manifold_rank.unwrap_or(d.manifold_rank),
        noise_scale: section.noise_scale.unwrap_or(d.noise_scale),
        anomaly_shift_scale: section.anomaly_shift_scale.unwrap_or(d.anomaly_shift_scale),
        seed: section.seed.unwrap_or(master_seed),
    }
}

impl ResolvedExperiment {
    pub fn architecture(&self, input_dim: usize) -> Result<ArchitectureSpec, CliError> {
        Ok(ArchitectureSpec::new(
            input_dim,
            self.encoder_ratios.clone(),
            self.hidden_activation,
        )?)
    }

    /// Same experiment with a different aggregator (for comparisons).
    pub fn with_aggregator(&self, aggregator: Aggregator) -> ResolvedExperiment {
        let mut other = self.clone();
        other.fed.aggregator = aggregator;
        other
    }
}

/// Serializable echo of a resolved experiment, written next to the reports.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho<'a> {
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
    pub seed: u64,
    pub anomaly_mix_ratio: f64,
    pub encoder_ratios: &'a [f64],
    pub hidden_activation: Activation,
    pub data: &'a ResolvedData,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    /// Digest over every prepared device dataset; two runs with equal
    /// digests consumed identical data.
    pub data_digest: String,
    pub feature_dim: usize,
}

impl ResolvedExperiment {
    pub fn echo<'a>(&'a self, provenance: Provenance) -> ConfigEcho<'a> {
        ConfigEcho {
            num_clients: self.fed.num_clients,
            num_selected: self.fed.num_selected,
            batch_size: self.fed.batch_size,
            baseline_num: self.fed.baseline_num,
            num_rounds: self.fed.num_rounds,
            epochs: self.fed.epochs,
            retrain_epochs: self.fed.retrain_epochs,
            optimizer: self.fed.optimizer,
            learning_rate: self.fed.learning_rate,
            weight_decay: self.fed.weight_decay,
            momentum: self.fed.momentum,
            aggregator: self.fed.aggregator,
            server_momentum_beta: self.fed.server_momentum_beta,
            client_weighting: self.fed.client_weighting,
            seed: self.fed.master_seed,
            anomaly_mix_ratio: self.anomaly_mix_ratio,
            encoder_ratios: &self.encoder_ratios,
            hidden_activation: self.hidden_activation,
            data: &self.data,
            provenance,
        }
    }
}
