use crate::error::{Error, Result};

/// Binary confusion counts; the positive class is anomalous (label 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

/// Tally predictions against actual labels. Labels are {0, 1}.
pub fn confusion(pred: &[u8], actual: &[u8]) -> Result<ConfusionCounts> {
    if pred.len() != actual.len() {
        return Err(Error::config(format!(
            "prediction count {} does not match label count {}",
            pred.len(),
            actual.len()
        )));
    }
    let mut counts = ConfusionCounts {
        true_pos: 0,
        false_pos: 0,
        true_neg: 0,
        false_neg: 0,
    };
    for (&p, &a) in pred.iter().zip(actual) {
        match (p != 0, a != 0) {
            (true, true) => counts.true_pos += 1,
            (true, false) => counts.false_pos += 1,
            (false, false) => counts.true_neg += 1,
            (false, true) => counts.false_neg += 1,
        }
    }
    Ok(counts)
}

/// The derived metric suite. Any metric whose denominator is 0 is reported
/// as 0 and listed in `degenerate` instead of becoming NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSet {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tpr: f64,
    pub fpr: f64,
    pub specificity: f64,
    pub npv: f64,
    pub degenerate: Vec<&'static str>,
}

pub fn metrics(counts: &ConfusionCounts) -> Result<MetricSet> {
    let n = counts.total();
    if n == 0 {
        return Err(Error::config("metrics over zero samples"));
    }
    let mut degenerate = Vec::new();
    let mut ratio = |name: &'static str, num: usize, den: usize| -> f64 {
        if den == 0 {
            degenerate.push(name);
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let tp = counts.true_pos;
    let fp = counts.false_pos;
    let tn = counts.true_neg;
    let fn_ = counts.false_neg;

    let accuracy = (tp + tn) as f64 / n as f64;
    let precision = ratio("precision", tp, tp + fp);
    let recall = ratio("recall", tp, tp + fn_);
    let fpr = ratio("fpr", fp, fp + tn);
    let specificity = ratio("specificity", tn, tn + fp);
    let npv = ratio("npv", tn, tn + fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        degenerate.push("f1");
        0.0
    };
    Ok(MetricSet {
        accuracy,
        precision,
        recall,
        f1,
        tpr: recall,
        fpr,
        specificity,
        npv,
        degenerate,
    })
}
