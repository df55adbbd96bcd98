//! Lattice environments the agent can be trained in.

use std::collections::HashMap;

use crate::combiner::{combine, RunningAggregate, WeightTable};
use crate::diversity::{measure_between, DiversityMethod, DiversitySettings};
use crate::error::{Error, Result};
use crate::metrics::{fmax, FMaxResult};
use crate::types::{EnsembleState, PredictionMatrix};

/// The subset lattice seen by the agent: states are ensembles, actions add
/// one predictor, and entering a state pays that state's reward.
pub trait LatticeEnv {
    /// Per-path bookkeeping carried from one state to the next.
    type Cursor: Clone;

    fn pool_size(&self) -> usize;

    /// Cursor positioned at START.
    fn start(&self) -> Self::Cursor;

    fn state(&self, cursor: &Self::Cursor) -> EnsembleState;

    /// Follows the edge adding `predictor` and returns the new cursor with
    /// the reward of the state it points at.
    fn step(&mut self, cursor: &Self::Cursor, predictor: usize) -> Result<(Self::Cursor, f64)>;

    /// The candidate whose successor is most diverse from the current
    /// ensemble, or `None` when exploration should fall back to random.
    fn most_diverse(&self, cursor: &Self::Cursor, candidates: &[usize]) -> Result<Option<usize>>;

    /// Rewards of every non-START state along `path`, which must begin at
    /// START and add one predictor per step.
    fn path_rewards(&mut self, path: &[EnsembleState]) -> Result<Vec<f64>> {
        let mut cursor = self.start();
        let mut rewards = Vec::with_capacity(path.len().saturating_sub(1));
        for pair in path.windows(2) {
            let added = added_member(&pair[0], &pair[1])?;
            let (next, r) = self.step(&cursor, added)?;
            cursor = next;
            rewards.push(r);
        }
        Ok(rewards)
    }
}

pub(crate) fn added_member(from: &EnsembleState, to: &EnsembleState) -> Result<usize> {
    let mut added = to.members().filter(|&p| !from.contains(p));
    match (added.next(), added.next()) {
        (Some(p), None) if to.cardinality() == from.cardinality() + 1 => Ok(p),
        _ => Err(Error::InvalidAction(format!(
            "{to:?} does not extend {from:?} by one predictor"
        ))),
    }
}

/// Memoised validation F-max of each visited ensemble.
#[derive(Debug, Clone, Default)]
pub struct RewardCache {
    entries: HashMap<EnsembleState, FMaxResult>,
}

impl RewardCache {
    pub fn get(&self, state: &EnsembleState) -> Option<&FMaxResult> {
        self.entries.get(state)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EnsembleState, &FMaxResult)> {
        self.entries.iter()
    }

    fn get_or_compute(
        &mut self,
        state: EnsembleState,
        scores: impl FnOnce() -> Result<Vec<f64>>,
        labels: &[bool],
    ) -> Result<f64> {
        if let Some(r) = self.entries.get(&state) {
            return Ok(r.fmax);
        }
        let r = fmax(&scores()?, labels)?;
        self.entries.insert(state, r);
        Ok(r.fmax)
    }
}

/// Ensemble selection over real predictor scores: the reward of a state is
/// the validation F-max of its weighted-mean ensemble.
#[derive(Debug, Clone)]
pub struct PredictorLattice<'a> {
    matrix: &'a PredictionMatrix,
    weights: &'a WeightTable,
    diversity: Option<DiversitySettings>,
    cache: RewardCache,
}

impl<'a> PredictorLattice<'a> {
    pub fn new(
        matrix: &'a PredictionMatrix,
        weights: &'a WeightTable,
        diversity: Option<DiversitySettings>,
    ) -> Result<Self> {
        if weights.len() != matrix.n_predictors() {
            return Err(Error::Shape(format!(
                "{} weights for {} predictors",
                weights.len(),
                matrix.n_predictors()
            )));
        }
        if matrix.n_positives() == 0 {
            return Err(Error::UndefinedRecall);
        }
        Ok(Self {
            matrix,
            weights,
            diversity,
            cache: RewardCache::default(),
        })
    }

    pub fn cache(&self) -> &RewardCache {
        &self.cache
    }

    pub fn matrix(&self) -> &PredictionMatrix {
        self.matrix
    }

    pub fn weights(&self) -> &WeightTable {
        self.weights
    }

    /// Validation F-max of `state`, memoised.
    pub fn reward(&mut self, state: &EnsembleState) -> Result<f64> {
        let (matrix, weights) = (self.matrix, self.weights);
        self.cache
            .get_or_compute(*state, || combine(state, matrix, weights), matrix.labels())
    }

    fn candidate_diversity(
        &self,
        current: &RunningAggregate,
        predictor: usize,
        settings: &DiversitySettings,
    ) -> Result<f64> {
        let labels = self.matrix.labels();
        let value = match settings.method {
            DiversityMethod::Diversity1 => {
                let next = current.extend(predictor, self.matrix, self.weights)?;
                measure_between(current.combined(), next.combined(), labels, settings)
            }
            DiversityMethod::Diversity2 => measure_between(
                current.combined(),
                self.matrix.scores(predictor),
                labels,
                settings,
            ),
        };
        // Undefined statistics carry no diversity signal.
        match value {
            Err(Error::UndefinedStatistic | Error::DegenerateVector(_)) => Ok(0.0),
            other => other,
        }
    }
}

impl LatticeEnv for PredictorLattice<'_> {
    type Cursor = RunningAggregate;

    fn pool_size(&self) -> usize {
        self.matrix.n_predictors()
    }

    fn start(&self) -> RunningAggregate {
        RunningAggregate::empty(self.matrix.n_examples())
    }

    fn state(&self, cursor: &RunningAggregate) -> EnsembleState {
        cursor.members()
    }

    fn step(
        &mut self,
        cursor: &RunningAggregate,
        predictor: usize,
    ) -> Result<(RunningAggregate, f64)> {
        let next = cursor.extend(predictor, self.matrix, self.weights)?;
        let combined = next.combined();
        let reward = self.cache.get_or_compute(
            next.members(),
            || Ok(combined.to_vec()),
            self.matrix.labels(),
        )?;
        Ok((next, reward))
    }

    fn most_diverse(
        &self,
        cursor: &RunningAggregate,
        candidates: &[usize],
    ) -> Result<Option<usize>> {
        let Some(settings) = self.diversity.as_ref() else {
            return Ok(None);
        };
        if cursor.members().is_empty() {
            return Ok(None);
        }
        let mut best: Option<(usize, f64)> = None;
        for &p in candidates {
            let d = self.candidate_diversity(cursor, p, settings)?;
            // Strict comparison keeps the lowest index among ties.
            if best.is_none_or(|(_, top)| d > top) {
                best = Some((p, d));
            }
        }
        Ok(best.map(|(p, _)| p))
    }

    fn path_rewards(&mut self, path: &[EnsembleState]) -> Result<Vec<f64>> {
        let mut rewards = Vec::with_capacity(path.len().saturating_sub(1));
        for pair in path.windows(2) {
            added_member(&pair[0], &pair[1])?;
            rewards.push(self.reward(&pair[1])?);
        }
        Ok(rewards)
    }
}

/// A lattice whose state rewards come from a closure. Exploration is always
/// random.
pub struct FnLattice<F> {
    pool_size: usize,
    reward: F,
}

impl<F: FnMut(&EnsembleState) -> f64> FnLattice<F> {
    pub fn new(pool_size: usize, reward: F) -> Self {
        Self { pool_size, reward }
    }
}

impl<F: FnMut(&EnsembleState) -> f64> LatticeEnv for FnLattice<F> {
    type Cursor = EnsembleState;

    fn pool_size(&self) -> usize {
        self.pool_size
    }

    fn start(&self) -> EnsembleState {
        EnsembleState::START
    }

    fn state(&self, cursor: &EnsembleState) -> EnsembleState {
        *cursor
    }

    fn step(&mut self, cursor: &EnsembleState, predictor: usize) -> Result<(EnsembleState, f64)> {
        let next = cursor.add(predictor, self.pool_size)?;
        Ok((next, (self.reward)(&next)))
    }

    fn most_diverse(&self, _: &EnsembleState, _: &[usize]) -> Result<Option<usize>> {
        Ok(None)
    }
}
