//! Synthetic predictor pools with controllable accuracy, correlation and
//! exact duplicates.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::types::{PredictionMatrix, RngHandle, MAX_PREDICTORS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticPoolSpec {
    pub n_examples: usize,
    pub n_predictors: usize,
    /// Fraction of positive examples; rounded to a whole count.
    pub positive_fraction: f64,
    /// Each distinct predictor's accuracy at the 0.5 cut is drawn uniformly
    /// from `[accuracy_min, accuracy_max]`.
    pub accuracy_min: f64,
    pub accuracy_max: f64,
    /// Share of each predictor's noise variance that comes from its
    /// group's common latent vector.
    pub correlation: f64,
    /// Distinct predictors are assigned round-robin to this many groups.
    pub correlation_groups: usize,
    /// Sizes of groups of bit-identical predictors. Predictors outside these
    /// groups are distinct.
    pub duplicate_groups: Vec<usize>,
    pub seed: u64,
}

impl Default for SyntheticPoolSpec {
    fn default() -> Self {
        Self {
            n_examples: 1000,
            n_predictors: 20,
            positive_fraction: 0.3,
            accuracy_min: 0.55,
            accuracy_max: 0.75,
            correlation: 0.5,
            correlation_groups: 3,
            duplicate_groups: Vec::new(),
            seed: 0,
        }
    }
}

impl SyntheticPoolSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_examples == 0 {
            return Err(Error::generation("n_examples", "must be at least 1"));
        }
        if self.n_predictors == 0 || self.n_predictors > MAX_PREDICTORS {
            return Err(Error::generation(
                "n_predictors",
                format!("must lie in 1..={MAX_PREDICTORS}"),
            ));
        }
        let positives = self.positive_count();
        if !(0.0..=1.0).contains(&self.positive_fraction) || positives == 0 {
            return Err(Error::generation(
                "positive_fraction",
                format!(
                    "yields {positives} positive examples out of {}; need at least 1",
                    self.n_examples
                ),
            ));
        }
        if positives == self.n_examples {
            return Err(Error::generation(
                "positive_fraction",
                "yields no negative examples",
            ));
        }
        if !(self.accuracy_min > 0.0 && self.accuracy_min <= 1.0) {
            return Err(Error::generation("accuracy_min", "must lie in (0, 1]"));
        }
        if !(self.accuracy_max >= self.accuracy_min && self.accuracy_max <= 1.0) {
            return Err(Error::generation(
                "accuracy_max",
                "must lie in [accuracy_min, 1]",
            ));
        }
        if !(0.0..=1.0).contains(&self.correlation) {
            return Err(Error::generation("correlation", "must lie in [0, 1]"));
        }
        if self.correlation_groups == 0 {
            return Err(Error::generation(
                "correlation_groups",
                "must be at least 1",
            ));
        }
        if self.duplicate_groups.contains(&0) {
            return Err(Error::generation(
                "duplicate_groups",
                "group sizes must be at least 1",
            ));
        }
        let copies: usize = self.duplicate_groups.iter().sum();
        if copies > self.n_predictors {
            return Err(Error::generation(
                "duplicate_groups",
                format!(
                    "{copies} copies exceed n_predictors = {}",
                    self.n_predictors
                ),
            ));
        }
        Ok(())
    }

    fn positive_count(&self) -> usize {
        (self.positive_fraction * self.n_examples as f64).round() as usize
    }
}

/// Width of predictor ids such as `p007`.
pub fn predictor_id(index: usize) -> String {
    format!("p{index:03}")
}

/// Draws labels and predictor scores according to `spec`.
///
/// For a predictor with accuracy `a`, the latent value of example `i` is
/// `sign(y_i) * Φ⁻¹(a) + noise_i` with standard normal noise, and the score
/// is its logistic transform. The score therefore crosses 0.5 on the correct
/// side with probability `a`. Accuracy 1 gives a perfectly separating
/// predictor.
pub fn generate_pool(spec: &SyntheticPoolSpec) -> Result<PredictionMatrix> {
    spec.validate()?;
    let root = RngHandle::new(spec.seed);
    let m = spec.n_examples;

    let positives = spec.positive_count();
    let mut labels: Vec<bool> = (0..m).map(|i| i < positives).collect();
    labels.shuffle(&mut root.derive(&[0]));

    let mut rng = root.derive(&[1]);
    let shared: Vec<Vec<f64>> = (0..spec.correlation_groups)
        .map(|_| (0..m).map(|_| rng.sample(StandardNormal)).collect())
        .collect();

    let copies: usize = spec.duplicate_groups.iter().sum();
    let distinct = spec.duplicate_groups.len() + (spec.n_predictors - copies);
    let normal = Normal::standard();
    let (w_shared, w_own) = (spec.correlation.sqrt(), (1.0 - spec.correlation).sqrt());

    let mut acc_rng = root.derive(&[2]);
    let columns: Vec<Vec<f64>> = (0..distinct)
        .map(|d| {
            let accuracy = acc_rng.random_range(spec.accuracy_min..=spec.accuracy_max);
            let mut noise_rng = root.derive(&[3, d as u64]);
            let common = &shared[d % spec.correlation_groups];
            (0..m)
                .map(|i| {
                    let own: f64 = noise_rng.sample(StandardNormal);
                    let noise = w_shared * common[i] + w_own * own;
                    let sign = if labels[i] { 1.0 } else { -1.0 };
                    let latent = if accuracy >= 1.0 {
                        sign * (0.5 + noise.abs())
                    } else {
                        sign * normal.inverse_cdf(accuracy) + noise
                    };
                    1.0 / (1.0 + (-latent).exp())
                })
                .collect()
        })
        .collect();

    let mut scores = Vec::with_capacity(spec.n_predictors);
    for (g, &size) in spec.duplicate_groups.iter().enumerate() {
        for _ in 0..size {
            scores.push(columns[g].clone());
        }
    }
    scores.extend(columns.into_iter().skip(spec.duplicate_groups.len()));
    let ids = (0..spec.n_predictors).map(predictor_id).collect();
    PredictionMatrix::new(ids, scores, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::fmax;

    #[test]
    fn perfect_accuracy_gives_perfect_fmax() {
        let spec = SyntheticPoolSpec {
            n_predictors: 3,
            accuracy_min: 1.0,
            accuracy_max: 1.0,
            ..SyntheticPoolSpec::default()
        };
        let m = generate_pool(&spec).unwrap();
        for p in 0..3 {
            assert_eq!(fmax(m.scores(p), m.labels()).unwrap().fmax, 1.0);
        }
    }

    #[test]
    fn duplicate_groups_are_identical() {
        let spec = SyntheticPoolSpec {
            n_predictors: 8,
            duplicate_groups: vec![5, 2],
            ..SyntheticPoolSpec::default()
        };
        let m = generate_pool(&spec).unwrap();
        for p in 1..5 {
            assert_eq!(m.scores(p), m.scores(0));
        }
        assert_eq!(m.scores(6), m.scores(5));
        assert_ne!(m.scores(5), m.scores(0));
        assert_ne!(m.scores(7), m.scores(0));
    }

    #[test]
    fn balance_and_shape() {
        let spec = SyntheticPoolSpec {
            n_examples: 200,
            n_predictors: 10,
            positive_fraction: 0.25,
            ..SyntheticPoolSpec::default()
        };
        let m = generate_pool(&spec).unwrap();
        assert_eq!(
            (m.n_predictors(), m.n_examples(), m.n_positives()),
            (10, 200, 50)
        );
        assert_eq!(m.ids()[9], "p009");
        assert_eq!(generate_pool(&spec).unwrap(), m);
    }

    #[test]
    fn infeasible_specs_name_their_field() {
        let cases = [
            (
                SyntheticPoolSpec {
                    positive_fraction: 0.0,
                    ..Default::default()
                },
                "positive_fraction",
            ),
            (
                SyntheticPoolSpec {
                    positive_fraction: 1.0,
                    ..Default::default()
                },
                "positive_fraction",
            ),
            (
                SyntheticPoolSpec {
                    n_predictors: 0,
                    ..Default::default()
                },
                "n_predictors",
            ),
            (
                SyntheticPoolSpec {
                    accuracy_min: 0.0,
                    ..Default::default()
                },
                "accuracy_min",
            ),
            (
                SyntheticPoolSpec {
                    accuracy_max: 0.5,
                    ..Default::default()
                },
                "accuracy_max",
            ),
            (
                SyntheticPoolSpec {
                    duplicate_groups: vec![30],
                    ..Default::default()
                },
                "duplicate_groups",
            ),
            (
                SyntheticPoolSpec {
                    correlation: 1.5,
                    ..Default::default()
                },
                "correlation",
            ),
        ];
        for (spec, field) in cases {
            match generate_pool(&spec) {
                Err(Error::Generation { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected error on {field}, got {other:?}"),
            }
        }
    }
}
