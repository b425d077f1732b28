//! Reconstruction-error thresholding and the binary detection metric suite.

mod auc;
mod confusion;
mod evaluate;
mod threshold;

pub use auc::auc;
pub use confusion::{confusion, metrics, ConfusionCounts, MetricSet};
pub use evaluate::{
    average_reports, evaluate_all, evaluate_device, DeviceReport, MetricAverages, MetricsReport,
};
pub use threshold::{classify, compute_threshold, reconstruction_scores, Threshold};
