//! Ranking metrics for binary classifiers. Both are computed from integer
//! pair and threshold counts, so they are exact.

use crate::error::{Error, Result};

fn check(scores: &[f64], labels: &[u8]) -> Result<(u64, u64)> {
    if scores.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} scores but {} labels",
            scores.len(),
            labels.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidParameter("NaN score".into()));
    }
    if let Some(bad) = labels.iter().find(|&&l| l > 1) {
        return Err(Error::DegenerateData(format!("label {bad} is not 0 or 1")));
    }
    let pos = labels.iter().filter(|&&l| l == 1).count() as u64;
    let neg = labels.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateData("labels contain a single class".into()));
    }
    Ok((pos, neg))
}

/// Groups of tied scores in increasing order, as (positives, negatives).
fn tie_groups(scores: &[f64], labels: &[u8]) -> Vec<(u64, u64)> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut groups: Vec<(u64, u64)> = Vec::new();
    let mut last = f64::NAN;
    for i in idx {
        // -0.0 and 0.0 compare equal and form one group
        if groups.is_empty() || scores[i] != last {
            groups.push((0, 0));
            last = scores[i];
        }
        let g = groups.last_mut().expect("non-empty");
        if labels[i] == 1 {
            g.0 += 1;
        } else {
            g.1 += 1;
        }
    }
    groups
}

/// Mann–Whitney AUC: `P(s⁺ > s⁻) + ½ P(s⁺ = s⁻)`.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let (pos, neg) = check(scores, labels)?;
    let mut neg_below = 0u64;
    // twice the concordant count plus the tied count
    let mut twice = 0u128;
    for (p, n) in tie_groups(scores, labels) {
        twice += 2 * p as u128 * neg_below as u128 + p as u128 * n as u128;
        neg_below += n;
    }
    Ok(twice as f64 / (2 * pos as u128 * neg as u128) as f64)
}

/// Kolmogorov–Smirnov separation `max_t |TPR(t) - FPR(t)|` over the
/// thresholds "score ≥ t".
pub fn ks_stat(scores: &[f64], labels: &[u8]) -> Result<f64> {
    let (pos, neg) = check(scores, labels)?;
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut best = 0u128;
    for (p, n) in tie_groups(scores, labels).into_iter().rev() {
        tp += p;
        fp += n;
        let gap = (tp as i128 * neg as i128 - fp as i128 * pos as i128).unsigned_abs();
        best = best.max(gap);
    }
    Ok(best as f64 / (pos as u128 * neg as u128) as f64)
}
