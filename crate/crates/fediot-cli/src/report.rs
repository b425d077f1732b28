//! Report writers. The metrics CSV contains only deterministic values and
//! prints floats in shortest round-trip form, so identical experiments
//! produce byte-identical files and the `avg` row can be re-derived exactly
//! from the device rows.

use std::io::Write;
use std::path::Path;

use sha2::{Digest, Sha256};

use fediot_core::data::DeviceDataset;
use fediot_core::federation::RoundLog;
use fediot_core::metrics::MetricsReport;

use crate::CliError;

pub const METRICS_COLUMNS: &str = "device,accuracy,precision,recall,f1,tpr,fpr,specificity,npv,auc";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn metrics_csv(report: &MetricsReport) -> String {
    let mut out = String::from(METRICS_COLUMNS);
    out.push('\n');
    for d in &report.devices {
        let m = &d.metrics;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            d.device_id,
            m.accuracy,
            m.precision,
            m.recall,
            m.f1,
            m.tpr,
            m.fpr,
            m.specificity,
            m.npv,
            fmt_opt(d.auc)
        ));
    }
    let a = &report.averages;
    out.push_str(&format!(
        "avg,{},{},{},{},{},{},{},{},{}\n",
        a.accuracy,
        a.precision,
        a.recall,
        a.f1,
        a.tpr,
        a.fpr,
        a.specificity,
        a.npv,
        fmt_opt(a.auc)
    ));
    out
}

pub fn write_metrics_csv(path: &Path, report: &MetricsReport) -> Result<(), CliError> {
    std::fs::write(path, metrics_csv(report))?;
    Ok(())
}

/// One JSON record per communication round.
pub fn write_round_log(path: &Path, rounds: &[RoundLog]) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path)?;
    for round in rounds {
        let line = serde_json::to_string(round)
            .map_err(|e| CliError::Io(format!("cannot serialize round log: {e}")))?;
        writeln!(file, "{line}")?;
    }
    Ok(())
}

pub fn write_config_echo<T: serde::Serialize>(path: &Path, echo: &T) -> Result<(), CliError> {
    let text = toml::to_string(echo)
        .map_err(|e| CliError::Io(format!("cannot serialize resolved config: {e}")))?;
    std::fs::write(path, text)?;
    Ok(())
}

fn hash_matrix(hasher: &mut Sha256, m: &fediot_core::numeric::Matrix) {
    hasher.update((m.rows() as u64).to_le_bytes());
    hasher.update((m.cols() as u64).to_le_bytes());
    for v in m.data() {
        hasher.update(v.to_bits().to_le_bytes());
    }
}

/// Digest over every prepared device dataset (partitions, labels, tags).
pub fn dataset_digest(datasets: &[DeviceDataset]) -> String {
    let mut hasher = Sha256::new();
    for ds in datasets {
        hasher.update((ds.device_id as u64).to_le_bytes());
        hash_matrix(&mut hasher, &ds.train_benign);
        hash_matrix(&mut hasher, &ds.threshold_benign);
        hash_matrix(&mut hasher, &ds.test_features);
        hasher.update(&ds.test_labels);
        for tag in &ds.test_tags {
            hasher.update(tag.as_bytes());
            hasher.update([0u8]);
        }
    }
    let digest = hasher.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}
