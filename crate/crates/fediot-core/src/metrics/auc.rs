use crate::error::{Error, Result};

/// Rank-based (Mann-Whitney) ROC AUC with half credit for ties:
/// `P(score_pos > score_neg) + 0.5 * P(score_pos == score_neg)`.
///
/// Returns `Ok(None)` when only one class is present, where the area is
/// undefined.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<Option<f64>> {
    if scores.len() != labels.len() {
        return Err(Error::config("auc score and label lengths differ"));
    }
    let pos = labels.iter().filter(|&&l| l != 0).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Ok(None);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).expect("scores must not be NaN"));

    // Average ranks over tie groups, then sum the positive ranks.
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j + 2) as f64 / 2.0; // ranks are 1-based
        for &idx in &order[i..=j] {
            if labels[idx] != 0 {
                rank_sum_pos += avg_rank;
            }
        }
        i = j + 1;
    }

    let pos = pos as f64;
    let neg = neg as f64;
    Ok(Some((rank_sum_pos - pos * (pos + 1.0) / 2.0) / (pos * neg)))
}
