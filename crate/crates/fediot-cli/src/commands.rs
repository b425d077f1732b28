use std::path::{Path, PathBuf};
use std::time::Instant;

use fediot_core::data::{split_and_scale, synth_generate, DeviceDataset, RawTable};
use fediot_core::federation::{run_federation, Aggregator, ExecutionMode, FederationRun};
use fediot_core::metrics::{evaluate_all, MetricsReport};
use fediot_core::numeric::{Purpose, RngStream, StreamLabel};

use crate::config::{Provenance, ResolvedData, ResolvedExperiment};
use crate::report;
use crate::CliError;

/// Everything a `run` leaves behind, for callers and tests.
pub struct RunArtifacts {
    pub report: MetricsReport,
    pub federation: FederationRun,
    pub data_digest: String,
    pub metrics_path: PathBuf,
    pub rounds_path: PathBuf,
    pub config_echo_path: PathBuf,
}

/// Generate the synthetic device tables and write one CSV per device.
pub fn cmd_synth(exp: &ResolvedExperiment) -> Result<Vec<PathBuf>, CliError> {
    let ResolvedData::Synth(synth) = &exp.data else {
        return Err(CliError::Config(
            "synth command requires a synthetic data source".into(),
        ));
    };
    let tables = synth_generate(synth)?;
    std::fs::create_dir_all(&exp.out_dir)?;
    let mut paths = Vec::with_capacity(tables.len());
    for (device, table) in tables.iter().enumerate() {
        let path = exp.out_dir.join(format!("device_{device:02}.csv"));
        table.write_csv(&path)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Expand a CSV path pattern with at most one `*` into sorted file paths.
fn expand_pattern(pattern: &str) -> Result<Vec<PathBuf>, CliError> {
    let stars = pattern.matches('*').count();
    if stars == 0 {
        return Ok(vec![PathBuf::from(pattern)]);
    }
    if stars > 1 {
        return Err(CliError::Config(format!(
            "data.pattern supports a single '*': {pattern}"
        )));
    }
    let (prefix, suffix) = pattern.split_once('*').expect("one star");
    let (dir, name_prefix) = match prefix.rsplit_once('/') {
        Some((dir, rest)) => (PathBuf::from(dir), rest.to_string()),
        None => (PathBuf::from("."), prefix.to_string()),
    };
    let mut matches = Vec::new();
    let entries = std::fs::read_dir(&dir)
        .map_err(|e| CliError::Io(format!("cannot list {}: {e}", dir.display())))?;
    for entry in entries {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with(&name_prefix) && name.ends_with(suffix) && entry.path().is_file() {
            matches.push(entry.path());
        }
    }
    matches.sort();
    if matches.is_empty() {
        return Err(CliError::Config(format!("no files match pattern {pattern}")));
    }
    Ok(matches)
}

/// Load (or generate), clean and split every device's data.
fn prepare_datasets(exp: &ResolvedExperiment) -> Result<Vec<DeviceDataset>, CliError> {
    let tables: Vec<RawTable> = match &exp.data {
        ResolvedData::Synth(synth) => synth_generate(synth)?
            .into_iter()
            .map(|t| t.clean(false))
            .collect(),
        ResolvedData::Csv(csv) => {
            let paths = expand_pattern(&csv.pattern)?;
            if paths.len() != exp.fed.num_clients {
                return Err(CliError::Config(format!(
                    "config expects {} clients but {} files match {}",
                    exp.fed.num_clients,
                    paths.len(),
                    csv.pattern
                )));
            }
            let mut tables = Vec::with_capacity(paths.len());
            for path in &paths {
                tables.push(RawTable::from_csv_path(path)?.clean(csv.drop_id_column));
            }
            tables
        }
    };
    if tables.len() != exp.fed.num_clients {
        return Err(CliError::Config(format!(
            "config expects {} clients but the data source provides {}",
            exp.fed.num_clients,
            tables.len()
        )));
    }
    let feature_dim = tables[0].num_features();
    for (d, t) in tables.iter().enumerate() {
        if t.num_features() != feature_dim {
            return Err(CliError::Format(format!(
                "device {d} has {} features, device 0 has {feature_dim}",
                t.num_features()
            )));
        }
    }
    tables
        .iter()
        .enumerate()
        .map(|(d, t)| {
            split_and_scale(
                d,
                t,
                exp.anomaly_mix_ratio,
                &RngStream::new(
                    exp.fed.master_seed,
                    StreamLabel::new(Purpose::Split, d as u64, 0),
                ),
            )
            .map_err(CliError::from)
        })
        .collect()
}

fn run_prepared(
    exp: &ResolvedExperiment,
    datasets: &[DeviceDataset],
    out_dir: &Path,
) -> Result<RunArtifacts, CliError> {
    let feature_dim = datasets[0].feature_dim();
    let arch = exp.architecture(feature_dim)?;
    let federation = run_federation(&exp.fed, &arch, datasets, ExecutionMode::Parallel)?;
    let report = evaluate_all(
        &federation.final_params,
        datasets,
        exp.hidden_activation,
        federation.wall_time_sec,
    )?;

    std::fs::create_dir_all(out_dir)?;
    let metrics_path = out_dir.join("metrics.csv");
    let rounds_path = out_dir.join("rounds.jsonl");
    let config_echo_path = out_dir.join("config_resolved.toml");
    let data_digest = report::dataset_digest(datasets);
    report::write_metrics_csv(&metrics_path, &report)?;
    report::write_round_log(&rounds_path, &federation.rounds)?;
    report::write_config_echo(
        &config_echo_path,
        &exp.echo(Provenance {
            data_digest: data_digest.clone(),
            feature_dim,
        }),
    )?;

    Ok(RunArtifacts {
        report,
        federation,
        data_digest,
        metrics_path,
        rounds_path,
        config_echo_path,
    })
}

fn print_run_summary(exp: &ResolvedExperiment, artifacts: &RunArtifacts) {
    let a = &artifacts.report.averages;
    println!(
        "{:?} | rounds {} | devices {} | federation {:.2}s",
        exp.fed.aggregator,
        exp.fed.num_rounds,
        artifacts.report.devices.len(),
        artifacts.federation.wall_time_sec
    );
    println!(
        "averages: precision {:.4} tpr {:.4} fpr {:.4} f1 {:.4} auc {}",
        a.precision,
        a.tpr,
        a.fpr,
        a.f1,
        a.auc.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into())
    );
}

/// Full pipeline: prepare data, run the federation, evaluate every device
/// and write the report bundle.
pub fn cmd_run(exp: &ResolvedExperiment) -> Result<RunArtifacts, CliError> {
    let datasets = prepare_datasets(exp)?;
    let artifacts = run_prepared(exp, &datasets, &exp.out_dir)?;
    print_run_summary(exp, &artifacts);
    Ok(artifacts)
}

/// One comparison row, mirroring the aggregate columns of the metrics table.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub model: Aggregator,
    pub precision_avg: f64,
    pub tpr_avg: f64,
    pub fpr_avg: f64,
    pub f1_avg: f64,
    pub auc_avg: Option<f64>,
    pub time_sec: f64,
}

fn compare_row(model: Aggregator, artifacts: &RunArtifacts) -> CompareRow {
    let a = &artifacts.report.averages;
    CompareRow {
        model,
        precision_avg: a.precision,
        tpr_avg: a.tpr,
        fpr_avg: a.fpr,
        f1_avg: a.f1,
        auc_avg: a.auc,
        time_sec: artifacts.federation.wall_time_sec,
    }
}

/// Run the identical experiment twice, FedAvg then FedAvgM, on the same
/// prepared data, and write a two-row comparison table plus both bundles.
pub fn cmd_compare(exp: &ResolvedExperiment) -> Result<(CompareRow, CompareRow), CliError> {
    let datasets = prepare_datasets(exp)?;
    let started = Instant::now();

    let avg_exp = exp.with_aggregator(Aggregator::FedAvg);
    let avg_art = run_prepared(&avg_exp, &datasets, &exp.out_dir.join("fedavg"))?;
    let avgm_exp = exp.with_aggregator(Aggregator::FedAvgM);
    let avgm_art = run_prepared(&avgm_exp, &datasets, &exp.out_dir.join("fedavgm"))?;

    debug_assert_eq!(avg_art.data_digest, avgm_art.data_digest);
    let rows = (
        compare_row(Aggregator::FedAvg, &avg_art),
        compare_row(Aggregator::FedAvgM, &avgm_art),
    );

    let table_path = exp.out_dir.join("compare.csv");
    let mut table = String::from("model,precision_avg,tpr_avg,fpr_avg,f1_avg,auc_avg,time_sec\n");
    for row in [&rows.0, &rows.1] {
        table.push_str(&format!(
            "{},{},{},{},{},{},{:.3}\n",
            match row.model {
                Aggregator::FedAvg => "fedavg",
                Aggregator::FedAvgM => "fedavgm",
            },
            row.precision_avg,
            row.tpr_avg,
            row.fpr_avg,
            row.f1_avg,
            row.auc_avg.map(|v| v.to_string()).unwrap_or_default(),
            row.time_sec
        ));
    }
    std::fs::write(&table_path, table)?;

    println!("compared aggregators in {:.2}s:", started.elapsed().as_secs_f64());
    for (name, row) in [("fedavg ", &rows.0), ("fedavgm", &rows.1)] {
        println!(
            "  {name}: precision {:.4} tpr {:.4} fpr {:.4} f1 {:.4} auc {} time {:.2}s",
            row.precision_avg,
            row.tpr_avg,
            row.fpr_avg,
            row.f1_avg,
            row.auc_avg.map(|v| format!("{v:.4}")).unwrap_or_else(|| "n/a".into()),
            row.time_sec
        );
    }
    Ok(rows)
}
