use rand::seq::SliceRandom;

use crate::data::table::RawTable;
use crate::error::{Error, Result};
use crate::numeric::{Matrix, RngStream};

/// Features whose benign-train standard deviation falls below this are
/// centered but not divided (divisor 1), so constant columns stay finite.
pub const DEGENERATE_STD: f64 = 1e-12;

/// Anomalous test rows sampled per benign test row, capped by availability.
pub const DEFAULT_ANOMALY_MIX_RATIO: f64 = 5.0;

/// Per-feature mean and population standard deviation, fit only on the
/// benign training partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ScalerStats {
    pub fn fit(train: &Matrix) -> Result<ScalerStats> {
        let (mean, std) = train.col_mean_std()?;
        Ok(ScalerStats { mean, std })
    }

    fn divisor(&self, col: usize) -> f64 {
        if self.std[col] < DEGENERATE_STD {
            1.0
        } else {
            self.std[col]
        }
    }

    pub fn transform(&self, m: &Matrix) -> Matrix {
        let mut out = m.clone();
        let cols = m.cols();
        for r in 0..m.rows() {
            let row = &mut out.data_mut()[r * cols..(r + 1) * cols];
            for (c, v) in row.iter_mut().enumerate() {
                *v = (*v - self.mean[c]) / self.divisor(c);
            }
        }
        out
    }

    pub fn inverse_transform(&self, m: &Matrix) -> Matrix {
        let mut out = m.clone();
        let cols = m.cols();
        for r in 0..m.rows() {
            let row = &mut out.data_mut()[r * cols..(r + 1) * cols];
            for (c, v) in row.iter_mut().enumerate() {
                *v = *v * self.divisor(c) + self.mean[c];
            }
        }
        out
    }
}

/// One device's data after preprocessing: standardized benign partitions for
/// training and threshold calculation, plus a mixed benign/anomalous test
/// set. All partitions are transformed with the same benign-train scaler.
#[derive(Debug, Clone)]
pub struct DeviceDataset {
    pub device_id: usize,
    pub train_benign: Matrix,
    pub threshold_benign: Matrix,
    pub test_features: Matrix,
    /// 0 = benign, 1 = anomalous.
    pub test_labels: Vec<u8>,
    /// Original type tags of the test rows, for per-family slicing.
    pub test_tags: Vec<String>,
    pub scaler: ScalerStats,
}

impl DeviceDataset {
    pub fn feature_dim(&self) -> usize {
        self.train_benign.cols()
    }
}

/// Shuffle the benign rows, split them into three contiguous thirds
/// (train / threshold / test-benign, remainder rows to train), fit the
/// scaler on the train third, blend in a without-replacement sample of
/// anomalous rows, and standardize every partition.
pub fn split_and_scale(
    device_id: usize,
    raw: &RawTable,
    anomaly_mix_ratio: f64,
    stream: &RngStream,
) -> Result<DeviceDataset> {
    if anomaly_mix_ratio <= 0.0 {
        return Err(Error::config("anomaly_mix_ratio must be positive"));
    }
    let (benign_idx, anomalous_idx) = raw.partition_indices();
    if benign_idx.len() < 3 {
        return Err(Error::config(format!(
            "device {device_id}: need at least 3 benign rows, found {}",
            benign_idx.len()
        )));
    }
    if anomalous_idx.is_empty() {
        return Err(Error::config(format!(
            "device {device_id}: need at least 1 anomalous row"
        )));
    }

    let mut rng = stream.rng();
    let mut shuffled = benign_idx;
    shuffled.shuffle(&mut rng);

    let third = shuffled.len() / 3;
    let train_n = third + shuffled.len() % 3;
    let train_rows = &shuffled[..train_n];
    let threshold_rows = &shuffled[train_n..train_n + third];
    let test_benign_rows = &shuffled[train_n + third..];

    let train_raw = raw.rows.select_rows(train_rows);
    let scaler = ScalerStats::fit(&train_raw)?;

    let wanted = (anomaly_mix_ratio * test_benign_rows.len() as f64).round() as usize;
    let take = wanted.min(anomalous_idx.len());
    let mut anomaly_pool = anomalous_idx;
    anomaly_pool.shuffle(&mut rng);
    let test_anomaly_rows = &anomaly_pool[..take];

    let test_rows: Vec<usize> = test_benign_rows
        .iter()
        .chain(test_anomaly_rows)
        .copied()
        .collect();
    let test_labels: Vec<u8> = test_benign_rows
        .iter()
        .map(|_| 0u8)
        .chain(test_anomaly_rows.iter().map(|_| 1u8))
        .collect();
    let test_tags: Vec<String> = test_rows.iter().map(|&r| raw.type_tags[r].clone()).collect();

    Ok(DeviceDataset {
        device_id,
        train_benign: scaler.transform(&train_raw),
        threshold_benign: scaler.transform(&raw.rows.select_rows(threshold_rows)),
        test_features: scaler.transform(&raw.rows.select_rows(&test_rows)),
        test_labels,
        test_tags,
        scaler,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{Purpose, StreamLabel};

    fn stream(seed: u64, device: u64) -> RngStream {
        RngStream::new(seed, StreamLabel::new(Purpose::Split, device, 0))
    }

    /// Benign rows count up from 0, anomalous rows sit far away at 1000+.
    fn toy_table(benign: usize, anomalous: usize) -> RawTable {
        let mut rows = Vec::new();
        let mut tags = Vec::new();
        for i in 0..benign {
            rows.push(vec![i as f64, 2.0 * i as f64 + 1.0]);
            tags.push("benign".to_string());
        }
        for i in 0..anomalous {
            rows.push(vec![1000.0 + i as f64, -(i as f64)]);
            tags.push(if i % 2 == 0 { "scan" } else { "combo" }.to_string());
        }
        RawTable::new(
            vec!["a".into(), "b".into()],
            Matrix::from_rows(&rows).unwrap(),
            tags,
        )
        .unwrap()
    }

    #[test]
    fn nine_benign_rows_split_three_ways_evenly() {
        let ds = split_and_scale(0, &toy_table(9, 5), 1.0, &stream(1, 0)).unwrap();
        assert_eq!(ds.train_benign.rows(), 3);
        assert_eq!(ds.threshold_benign.rows(), 3);
        assert_eq!(ds.test_labels.iter().filter(|&&l| l == 0).count(), 3);
    }

    #[test]
    fn remainder_benign_rows_go_to_training() {
        let ds = split_and_scale(0, &toy_table(10, 5), 1.0, &stream(2, 0)).unwrap();
        assert_eq!(ds.train_benign.rows(), 4);
        assert_eq!(ds.threshold_benign.rows(), 3);
        assert_eq!(ds.test_labels.iter().filter(|&&l| l == 0).count(), 3);
    }

    #[test]
    fn train_partition_is_standardized_to_zero_mean_unit_std() {
        let ds = split_and_scale(0, &toy_table(60, 10), 1.0, &stream(3, 0)).unwrap();
        let (means, stds) = ds.train_benign.col_mean_std().unwrap();
        for c in 0..2 {
            assert!(means[c].abs() < 1e-9, "column {c} mean {}", means[c]);
            assert!((stds[c] - 1.0).abs() < 1e-9, "column {c} std {}", stds[c]);
        }
    }

    #[test]
    fn constant_feature_is_centered_with_unit_divisor() {
        let mut rows = Vec::new();
        let mut tags = Vec::new();
        for i in 0..12 {
            rows.push(vec![7.5, i as f64]);
            tags.push("benign".to_string());
        }
        rows.push(vec![7.5, 99.0]);
        tags.push("scan".to_string());
        let raw = RawTable::new(
            vec!["const".into(), "x".into()],
            Matrix::from_rows(&rows).unwrap(),
            tags,
        )
        .unwrap();
        let ds = split_and_scale(0, &raw, 1.0, &stream(4, 0)).unwrap();
        assert_eq!(ds.scaler.std[0], 0.0);
        for r in 0..ds.train_benign.rows() {
            assert_eq!(ds.train_benign.get(r, 0), 0.0);
        }
        assert!(ds.test_features.is_finite());
    }

    #[test]
    fn too_few_benign_rows_is_config_error() {
        let err = split_and_scale(0, &toy_table(2, 5), 1.0, &stream(5, 0));
        assert!(matches!(err, Err(Error::Config(_))));
        let err = split_and_scale(0, &toy_table(9, 0), 1.0, &stream(5, 0));
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn anomaly_sample_count_follows_ratio_and_cap() {
        // 9 benign -> 3 benign test rows; ratio 2.0 wants 6 of the 20 available.
        let ds = split_and_scale(0, &toy_table(9, 20), 2.0, &stream(6, 0)).unwrap();
        assert_eq!(ds.test_labels.iter().filter(|&&l| l == 1).count(), 6);

        // Ratio 9.0 wants 27 but only 4 are available.
        let ds = split_and_scale(0, &toy_table(9, 4), 9.0, &stream(7, 0)).unwrap();
        assert_eq!(ds.test_labels.iter().filter(|&&l| l == 1).count(), 4);
    }

    #[test]
    fn test_labels_match_row_origin() {
        let ds = split_and_scale(0, &toy_table(30, 40), 3.0, &stream(8, 0)).unwrap();
        // Benign rows were built with feature a < 1000, anomalous >= 1000;
        // undo the scaler to check each test row's origin.
        let raw_rows = ds.scaler.inverse_transform(&ds.test_features);
        for (r, &label) in ds.test_labels.iter().enumerate() {
            let a = raw_rows.get(r, 0);
            if label == 0 {
                assert!(a < 1000.0);
                assert!(RawTable::is_benign(&ds.test_tags[r]));
            } else {
                assert!(a >= 1000.0);
                assert!(!RawTable::is_benign(&ds.test_tags[r]));
            }
        }
    }

    #[test]
    fn split_is_deterministic_and_seed_sensitive() {
        let raw = toy_table(30, 40);
        let a = split_and_scale(0, &raw, 3.0, &stream(9, 0)).unwrap();
        let b = split_and_scale(0, &raw, 3.0, &stream(9, 0)).unwrap();
        assert_eq!(a.train_benign.data(), b.train_benign.data());
        assert_eq!(a.test_labels, b.test_labels);
        let c = split_and_scale(0, &raw, 3.0, &stream(10, 0)).unwrap();
        assert_ne!(a.train_benign.data(), c.train_benign.data());
    }
}
