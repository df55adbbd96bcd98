//! Aggregation of member scores into ensemble scores.
//!
//! The default combiner is a weighted mean with each predictor weighted by its
//! validation F-max. [`RunningAggregate`] maintains the same mean
//! incrementally as predictors are added one at a time along a lattice path.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::fmax;
use crate::types::{EnsembleState, PredictionMatrix};

/// One non-negative weight per base predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable(Vec<f64>);

impl WeightTable {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::Shape(format!("invalid weight {w}")));
        }
        Ok(Self(weights))
    }

    /// Every predictor weighted 1.
    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn get(&self, predictor: usize) -> f64 {
        self.0[predictor]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Weights of a predictor subset, reindexed in selection order.
    pub fn select(&self, predictors: &[usize]) -> Self {
        Self(predictors.iter().map(|&p| self.0[p]).collect())
    }
}

/// Weights each predictor by its F-max on `matrix`.
pub fn compute_weights(matrix: &PredictionMatrix) -> Result<WeightTable> {
    let weights = (0..matrix.n_predictors())
        .map(|p| fmax(matrix.scores(p), matrix.labels()).map(|r| r.fmax))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightTable(weights))
}

/// How member score vectors are merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineRule {
    #[default]
    WeightedMean,
    Mean,
    Median,
}

fn check_ensemble(ensemble: &EnsembleState, matrix: &PredictionMatrix) -> Result<()> {
    if ensemble.is_empty() {
        return Err(Error::InvalidEnsemble("ensemble is empty".into()));
    }
    if !ensemble.fits(matrix.n_predictors()) {
        return Err(Error::InvalidEnsemble(format!(
            "ensemble {ensemble:?} exceeds pool of {}",
            matrix.n_predictors()
        )));
    }
    Ok(())
}

/// Performance-weighted mean of the members' score vectors.
pub fn combine(
    ensemble: &EnsembleState,
    matrix: &PredictionMatrix,
    weights: &WeightTable,
) -> Result<Vec<f64>> {
    combine_with(CombineRule::WeightedMean, ensemble, matrix, weights)
}

pub fn combine_with(
    rule: CombineRule,
    ensemble: &EnsembleState,
    matrix: &PredictionMatrix,
    weights: &WeightTable,
) -> Result<Vec<f64>> {
    check_ensemble(ensemble, matrix)?;
    let m = matrix.n_examples();
    match rule {
        CombineRule::WeightedMean => {
            let total: f64 = ensemble.members().map(|p| weights.get(p)).sum();
            if total <= 0.0 {
                return Err(Error::DegenerateWeights);
            }
            let mut out = vec![0.0; m];
            for p in ensemble.members() {
                let w = weights.get(p);
                for (o, &s) in out.iter_mut().zip(matrix.scores(p)) {
                    *o += w * s;
                }
            }
            // Keep rounding from drifting outside the members' range.
            for o in &mut out {
                *o = (*o / total).clamp(0.0, 1.0);
            }
            Ok(out)
        }
        CombineRule::Mean => {
            let k = ensemble.cardinality() as f64;
            let mut out = vec![0.0; m];
            for p in ensemble.members() {
                for (o, &s) in out.iter_mut().zip(matrix.scores(p)) {
                    *o += s;
                }
            }
            out.iter_mut().for_each(|o| *o = (*o / k).clamp(0.0, 1.0));
            Ok(out)
        }
        CombineRule::Median => {
            let members: Vec<usize> = ensemble.members().collect();
            let mut column = Vec::with_capacity(members.len());
            Ok((0..m)
                .map(|i| {
                    column.clear();
                    column.extend(members.iter().map(|&p| matrix.scores(p)[i]));
                    column.sort_unstable_by(f64::total_cmp);
                    let k = column.len();
                    if k % 2 == 1 {
                        column[k / 2]
                    } else {
                        0.5 * (column[k / 2 - 1] + column[k / 2])
                    }
                })
                .collect())
        }
    }
}

/// Weighted mean maintained as a cumulative moving average.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningAggregate {
    combined: Vec<f64>,
    weight_sum: f64,
    members: EnsembleState,
}

impl RunningAggregate {
    /// The aggregate of the empty ensemble over `n_examples` examples.
    pub fn empty(n_examples: usize) -> Self {
        Self {
            combined: vec![0.0; n_examples],
            weight_sum: 0.0,
            members: EnsembleState::START,
        }
    }

    pub fn combined(&self) -> &[f64] {
        &self.combined
    }

    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    pub fn members(&self) -> EnsembleState {
        self.members
    }

    /// Folds `predictor` into the average without revisiting other members.
    pub fn extend(
        &self,
        predictor: usize,
        matrix: &PredictionMatrix,
        weights: &WeightTable,
    ) -> Result<Self> {
        let members = self.members.add(predictor, matrix.n_predictors())?;
        let w = weights.get(predictor);
        let total = self.weight_sum + w;
        if total <= 0.0 {
            return Err(Error::DegenerateWeights);
        }
        let combined = self
            .combined
            .iter()
            .zip(matrix.scores(predictor))
            .map(|(&c, &s)| ((self.weight_sum * c + w * s) / total).clamp(0.0, 1.0))
            .collect();
        Ok(Self {
            combined,
            weight_sum: total,
            members,
        })
    }
}
