//! Threshold-based performance scores: precision, recall, F-measure and F-max.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Operating point at which the F-measure peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FMaxResult {
    pub fmax: f64,
    /// Lowest-scoring example still predicted positive (`score >= threshold`).
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

fn check(scores: &[f64], labels: &[bool]) -> Result<usize> {
    if scores.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let positives = labels.iter().filter(|&&y| y).count();
    if positives == 0 {
        return Err(Error::UndefinedRecall);
    }
    Ok(positives)
}

/// Precision and recall when every example with `score >= threshold` is
/// predicted positive. Precision is 0 when nothing is predicted positive.
pub fn precision_recall(scores: &[f64], labels: &[bool], threshold: f64) -> Result<(f64, f64)> {
    let positives = check(scores, labels)?;
    let (mut tp, mut fp) = (0usize, 0usize);
    for (&s, &y) in scores.iter().zip(labels) {
        if s >= threshold {
            if y {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    Ok((precision, tp as f64 / positives as f64))
}

/// Maximum F-measure over every distinct score used as a threshold.
///
/// The F-measure only changes at observed scores, so this sweep is exact. A
/// threshold below the minimum classifies exactly like the minimum itself
/// under the `>=` rule and needs no separate evaluation. Among equal maxima
/// the highest threshold is reported.
pub fn fmax(scores: &[f64], labels: &[bool]) -> Result<FMaxResult> {
    let positives = check(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut best: Option<FMaxResult> = None;
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let threshold = scores[order[i]];
        while i < order.len() && scores[order[i]] == threshold {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let precision = tp as f64 / (tp + fp) as f64;
        let recall = tp as f64 / positives as f64;
        let f = f_measure(precision, recall);
        if best.is_none_or(|b| f > b.fmax) {
            best = Some(FMaxResult {
                fmax: f,
                threshold,
                precision,
                recall,
            });
        }
    }
    // `check` guarantees at least one example.
    Ok(best.expect("non-empty score vector"))
}
