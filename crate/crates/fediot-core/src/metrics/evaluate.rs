use crate::autoencoder::{Activation, ModelParams};
use crate::data::DeviceDataset;
use crate::error::Result;
use crate::metrics::auc::auc;
use crate::metrics::confusion::{confusion, metrics, ConfusionCounts, MetricSet};
use crate::metrics::threshold::{classify, compute_threshold, reconstruction_scores, Threshold};

/// One device's full evaluation row.
#[derive(Debug, Clone)]
pub struct DeviceReport {
    pub device_id: usize,
    pub threshold: Threshold,
    pub counts: ConfusionCounts,
    pub metrics: MetricSet,
    /// Absent when the test set is single-class.
    pub auc: Option<f64>,
}

/// Unweighted cross-device means of the metric suite.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAverages {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tpr: f64,
    pub fpr: f64,
    pub specificity: f64,
    pub npv: f64,
    /// Mean over devices whose AUC is defined; absent if none is.
    pub auc: Option<f64>,
}

/// Per-device rows plus cross-device averages and the wall time of the
/// federation phase that produced the evaluated model.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub devices: Vec<DeviceReport>,
    pub averages: MetricAverages,
    pub wall_time_sec: f64,
}

/// Threshold on the device's benign threshold partition, classify its test
/// set, tally and derive the metric suite.
pub fn evaluate_device(params: &ModelParams, ds: &DeviceDataset, act: Activation) -> Result<DeviceReport> {
    let threshold = compute_threshold(ds.device_id, params, &ds.threshold_benign, act)?;
    let pred = classify(params, threshold.tr, &ds.test_features, act)?;
    let counts = confusion(&pred, &ds.test_labels)?;
    let metric_set = metrics(&counts)?;
    if !metric_set.degenerate.is_empty() {
        log::warn!(
            "device {}: degenerate metrics reported as 0: {}",
            ds.device_id,
            metric_set.degenerate.join(", ")
        );
    }
    let scores = reconstruction_scores(params, &ds.test_features, act)?;
    let auc_value = auc(&scores, &ds.test_labels)?;
    Ok(DeviceReport {
        device_id: ds.device_id,
        threshold,
        counts,
        metrics: metric_set,
        auc: auc_value,
    })
}

fn unweighted_mean(values: impl Iterator<Item = f64>) -> f64 {
    let collected: Vec<f64> = values.collect();
    collected.iter().sum::<f64>() / collected.len() as f64
}

pub fn average_reports(devices: &[DeviceReport]) -> MetricAverages {
    let aucs: Vec<f64> = devices.iter().filter_map(|d| d.auc).collect();
    MetricAverages {
        accuracy: unweighted_mean(devices.iter().map(|d| d.metrics.accuracy)),
        precision: unweighted_mean(devices.iter().map(|d| d.metrics.precision)),
        recall: unweighted_mean(devices.iter().map(|d| d.metrics.recall)),
        f1: unweighted_mean(devices.iter().map(|d| d.metrics.f1)),
        tpr: unweighted_mean(devices.iter().map(|d| d.metrics.tpr)),
        fpr: unweighted_mean(devices.iter().map(|d| d.metrics.fpr)),
        specificity: unweighted_mean(devices.iter().map(|d| d.metrics.specificity)),
        npv: unweighted_mean(devices.iter().map(|d| d.metrics.npv)),
        auc: if aucs.is_empty() {
            None
        } else {
            Some(aucs.iter().sum::<f64>() / aucs.len() as f64)
        },
    }
}

/// Evaluate every device with the same (final global) model.
pub fn evaluate_all(
    params: &ModelParams,
    datasets: &[DeviceDataset],
    act: Activation,
    wall_time_sec: f64,
) -> Result<MetricsReport> {
    let devices: Vec<DeviceReport> = datasets
        .iter()
        .map(|ds| evaluate_device(params, ds, act))
        .collect::<Result<_>>()?;
    let averages = average_reports(&devices);
    Ok(MetricsReport {
        devices,
        averages,
        wall_time_sec,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autoencoder::LayerParams;
    use crate::data::ScalerStats;
    use crate::numeric::Matrix;

    /// Zero network: a row's anomaly score is its mean square.
    fn zero_net(dim: usize) -> ModelParams {
        ModelParams {
            layers: vec![
                LayerParams {
                    weight: Matrix::zeros(dim, dim),
                    bias: vec![0.0; dim],
                },
                LayerParams {
                    weight: Matrix::zeros(dim, dim),
                    bias: vec![0.0; dim],
                },
            ],
        }
    }

    fn toy_dataset(device_id: usize, benign_mag: f64, anomaly_mag: f64) -> DeviceDataset {
        // Benign rows score benign_mag^2, anomalies anomaly_mag^2 under the
        // zero net; the threshold partition pins tr at benign_mag^2.
        let benign_row = vec![benign_mag, -benign_mag];
        let anomaly_row = vec![anomaly_mag, anomaly_mag];
        DeviceDataset {
            device_id,
            train_benign: Matrix::from_rows(&vec![benign_row.clone(); 4]).unwrap(),
            threshold_benign: Matrix::from_rows(&vec![benign_row.clone(); 4]).unwrap(),
            test_features: Matrix::from_rows(&[
                benign_row.clone(),
                benign_row,
                anomaly_row.clone(),
                anomaly_row,
            ])
            .unwrap(),
            test_labels: vec![0, 0, 1, 1],
            test_tags: vec!["benign".into(), "benign".into(), "scan".into(), "combo".into()],
            scaler: ScalerStats {
                mean: vec![0.0, 0.0],
                std: vec![1.0, 1.0],
            },
        }
    }

    #[test]
    fn separable_toy_device_scores_perfect_f1() {
        let ds = toy_dataset(0, 0.5, 3.0);
        let report = evaluate_device(&zero_net(2), &ds, Activation::Relu).unwrap();
        assert_eq!(report.metrics.f1, 1.0);
        assert_eq!(report.metrics.fpr, 0.0);
        assert_eq!(report.auc, Some(1.0));
        assert_eq!(report.counts.true_pos, 2);
        assert_eq!(report.counts.true_neg, 2);
        // Eq.-style identity: tr is exactly mean + std of the partition.
        assert_eq!(report.threshold.tr, report.threshold.mse_mean + report.threshold.mse_std);
    }

    #[test]
    fn averages_are_unweighted_means_over_devices() {
        let datasets: Vec<DeviceDataset> = (0..3)
            .map(|d| toy_dataset(d, 0.3 + 0.1 * d as f64, 2.0 + d as f64))
            .collect();
        let report = evaluate_all(&zero_net(2), &datasets, Activation::Relu, 1.25).unwrap();
        assert_eq!(report.devices.len(), 3);
        assert_eq!(report.wall_time_sec, 1.25);
        let mean_f1 =
            report.devices.iter().map(|d| d.metrics.f1).sum::<f64>() / report.devices.len() as f64;
        assert!((report.averages.f1 - mean_f1).abs() < 1e-12);
        let mean_fpr =
            report.devices.iter().map(|d| d.metrics.fpr).sum::<f64>() / report.devices.len() as f64;
        assert!((report.averages.fpr - mean_fpr).abs() < 1e-12);
        let mean_auc = report.devices.iter().filter_map(|d| d.auc).sum::<f64>() / 3.0;
        assert_eq!(report.averages.auc, Some(mean_auc));
    }
}
