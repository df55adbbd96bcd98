use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::RngHandle;

/// Train/validation/test proportions and the cross-validation fold count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
    pub folds: usize,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train: 0.6,
            validation: 0.2,
            test: 0.2,
            folds: 5,
            seed: 0,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("split.train", self.train),
            ("split.validation", self.validation),
            ("split.test", self.test),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::config(field, "must lie in (0, 1)"));
            }
        }
        if (self.train + self.validation + self.test - 1.0).abs() > 1e-9 {
            return Err(Error::config("split", "fractions must sum to 1"));
        }
        if self.folds == 0 {
            return Err(Error::config("split.folds", "must be at least 1"));
        }
        Ok(())
    }
}

/// Example indices of one fold, each list ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

/// Partitions the examples for `fold`.
///
/// Each class is shuffled once with `spec.seed` and treated as a ring. The
/// fold picks a starting offset on that ring; the test block comes first,
/// then the validation block, and the remainder is training data. With the
/// default 60/20/20 split over five folds, every example is tested exactly
/// once. Stratifying by class keeps positives in every part.
pub fn split(labels: &[bool], spec: &SplitSpec, fold: usize) -> Result<Split> {
    spec.validate()?;
    if fold >= spec.folds {
        return Err(Error::Split(format!(
            "fold {fold} out of range for {} folds",
            spec.folds
        )));
    }
    let mut out = Split {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
    };
    for (tag, class) in [(1u64, true), (0u64, false)] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        let n = idx.len();
        if n == 0 {
            continue;
        }
        idx.shuffle(&mut RngHandle::new(spec.seed).derive(&[tag]));
        let n_test = (spec.test * n as f64).round() as usize;
        let n_val = ((spec.validation * n as f64).round() as usize).min(n - n_test.min(n));
        let offset = fold * n / spec.folds;
        idx.rotate_left(offset);
        out.test.extend_from_slice(&idx[..n_test.min(n)]);
        out.validation
            .extend_from_slice(&idx[n_test.min(n)..n_test.min(n) + n_val]);
        out.train.extend_from_slice(&idx[n_test.min(n) + n_val..]);
    }
    for (part, v) in [
        ("training", &mut out.train),
        ("validation", &mut out.validation),
        ("test", &mut out.test),
    ] {
        v.sort_unstable();
        if !v.iter().any(|&i| labels[i]) {
            return Err(Error::Split(format!(
                "too few examples: the {part} part of fold {fold} has no positive example"
            )));
        }
    }
    Ok(out)
}

/// A random ordering of `ids` cut into nested prefixes of `step`, `2*step`,
/// ... items. The last pool always holds every id.
pub fn grow_pool<T: Clone>(ids: &[T], step: usize, rng: &mut RngHandle) -> Result<Vec<Vec<T>>> {
    if step == 0 {
        return Err(Error::config("pool_step", "must be at least 1"));
    }
    let mut order = ids.to_vec();
    order.shuffle(rng);
    Ok(pool_sizes(ids.len(), step)
        .into_iter()
        .map(|k| order[..k].to_vec())
        .collect())
}

/// Pool sizes visited by [`grow_pool`].
pub fn pool_sizes(n: usize, step: usize) -> Vec<usize> {
    if step == 0 || n == 0 {
        return Vec::new();
    }
    let mut sizes: Vec<usize> = (1..=n / step).map(|k| k * step).collect();
    if !n.is_multiple_of(step) {
        sizes.push(n);
    }
    sizes
}
