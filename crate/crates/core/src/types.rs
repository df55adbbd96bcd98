//! Shared data model: score vectors, prediction matrices, lattice states and
//! seeded randomness.

use std::collections::HashSet;
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest predictor pool an [`EnsembleState`] can address.
pub const MAX_PREDICTORS: usize = 256;

const WORDS: usize = MAX_PREDICTORS / 64;

/// Prediction scores of one base predictor over a fixed set of examples.
///
/// Every score is finite and lies in `[0, 1]`. Out-of-range values are
/// rejected rather than clamped.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::Shape("score vector is empty".into()));
        }
        if let Some((example, &value)) = scores
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && (0.0..=1.0).contains(*v)))
        {
            return Err(Error::InvalidScore {
                predictor: 0,
                example,
                value,
            });
        }
        Ok(Self(scores))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for ScoreVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Score vectors of `N` base predictors over `M` labelled examples.
///
/// Labels are stored as `bool` with `true` marking the positive class.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrix {
    ids: Vec<String>,
    scores: Vec<ScoreVector>,
    labels: Vec<bool>,
}

impl PredictionMatrix {
    pub fn new(ids: Vec<String>, scores: Vec<Vec<f64>>, labels: Vec<bool>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::Shape("prediction matrix has no predictors".into()));
        }
        if scores.len() > MAX_PREDICTORS {
            return Err(Error::Shape(format!(
                "{} predictors exceeds the supported maximum of {MAX_PREDICTORS}",
                scores.len()
            )));
        }
        if ids.len() != scores.len() {
            return Err(Error::Shape(format!(
                "{} predictor ids for {} score vectors",
                ids.len(),
                scores.len()
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        if let Some(dup) = ids.iter().find(|id| !seen.insert(id.as_str())) {
            return Err(Error::Shape(format!("duplicate predictor id `{dup}`")));
        }
        let mut vectors = Vec::with_capacity(scores.len());
        for (predictor, column) in scores.into_iter().enumerate() {
            if column.len() != labels.len() {
                return Err(Error::Shape(format!(
                    "predictor `{}` has {} scores but there are {} labels",
                    ids[predictor],
                    column.len(),
                    labels.len()
                )));
            }
            let v = ScoreVector::new(column).map_err(|e| match e {
                Error::InvalidScore { example, value, .. } => Error::InvalidScore {
                    predictor,
                    example,
                    value,
                },
                other => other,
            })?;
            vectors.push(v);
        }
        Ok(Self {
            ids,
            scores: vectors,
            labels,
        })
    }

    pub fn n_predictors(&self) -> usize {
        self.scores.len()
    }

    pub fn n_examples(&self) -> usize {
        self.labels.len()
    }

    pub fn n_positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y).count()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn scores(&self, predictor: usize) -> &[f64] {
        self.scores[predictor].as_slice()
    }

    /// Restricts the matrix to the given examples, in the given order.
    pub fn select_examples(&self, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Shape("example selection is empty".into()));
        }
        if let Some(&r) = rows.iter().find(|&&r| r >= self.n_examples()) {
            return Err(Error::Shape(format!("example index {r} out of range")));
        }
        let scores = self
            .scores
            .iter()
            .map(|v| ScoreVector(rows.iter().map(|&r| v.0[r]).collect()))
            .collect();
        let labels = rows.iter().map(|&r| self.labels[r]).collect();
        Ok(Self {
            ids: self.ids.clone(),
            scores,
            labels,
        })
    }

    /// Restricts the matrix to the given predictors, in the given order.
    pub fn select_predictors(&self, predictors: &[usize]) -> Result<Self> {
        if predictors.is_empty() {
            return Err(Error::Shape("predictor selection is empty".into()));
        }
        let mut seen = HashSet::with_capacity(predictors.len());
        for &p in predictors {
            if p >= self.n_predictors() || !seen.insert(p) {
                return Err(Error::Shape(format!(
                    "bad predictor index {p} in selection"
                )));
            }
        }
        Ok(Self {
            ids: predictors.iter().map(|&p| self.ids[p].clone()).collect(),
            scores: predictors.iter().map(|&p| self.scores[p].clone()).collect(),
            labels: self.labels.clone(),
        })
    }
}

/// A node of the subset lattice: a set of predictor indices stored as a
/// fixed-width bit mask.
///
/// The empty set is the START state; the full set for a pool of `N`
/// predictors is the FINISH state.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct EnsembleState {
    words: [u64; WORDS],
}

impl EnsembleState {
    pub const START: Self = Self { words: [0; WORDS] };

    /// The FINISH state of a pool of `n` predictors.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_PREDICTORS, "pool of {n} exceeds {MAX_PREDICTORS}");
        let mut s = Self::START;
        for p in 0..n {
            s.words[p / 64] |= 1 << (p % 64);
        }
        s
    }

    pub fn from_members(members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::START;
        for p in members {
            if p >= MAX_PREDICTORS {
                return Err(Error::InvalidAction(format!("predictor {p} out of range")));
            }
            s.words[p / 64] |= 1 << (p % 64);
        }
        Ok(s)
    }

    pub fn contains(&self, predictor: usize) -> bool {
        predictor < MAX_PREDICTORS && self.words[predictor / 64] & (1 << (predictor % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn cardinality(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_finish(&self, pool_size: usize) -> bool {
        *self == Self::full(pool_size)
    }

    /// Adds `predictor` to the ensemble of a pool of `pool_size` predictors.
    pub fn add(&self, predictor: usize, pool_size: usize) -> Result<Self> {
        if predictor >= pool_size.min(MAX_PREDICTORS) {
            return Err(Error::InvalidAction(format!(
                "predictor {predictor} out of range for pool of {pool_size}"
            )));
        }
        if self.contains(predictor) {
            return Err(Error::InvalidAction(format!(
                "predictor {predictor} is already a member"
            )));
        }
        let mut s = *self;
        s.words[predictor / 64] |= 1 << (predictor % 64);
        Ok(s)
    }

    /// Predictors of the pool that are not yet members, in ascending order.
    pub fn available(&self, pool_size: usize) -> Vec<usize> {
        (0..pool_size).filter(|&p| !self.contains(p)).collect()
    }

    /// All states reachable by adding one predictor.
    pub fn successors(&self, pool_size: usize) -> Vec<Self> {
        self.available(pool_size)
            .into_iter()
            .map(|p| {
                let mut s = *self;
                s.words[p / 64] |= 1 << (p % 64);
                s
            })
            .collect()
    }

    /// Member indices in ascending order.
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + tz)
            })
        })
    }

    /// Whether every member index is below `pool_size`.
    pub fn fits(&self, pool_size: usize) -> bool {
        self.members().all(|p| p < pool_size)
    }
}

impl fmt::Debug for EnsembleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}

/// Seeded, single-owner random stream.
///
/// Independent streams are obtained with [`RngHandle::derive`] rather than by
/// sharing one handle.
#[derive(Debug, Clone)]
pub struct RngHandle {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngHandle {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A fresh stream whose seed is a hash of this handle's seed and `tags`.
    pub fn derive(&self, tags: &[u64]) -> Self {
        Self::new(derive_seed(self.seed, tags))
    }
}

/// Mixes a master seed with a sequence of tags (splitmix64 finaliser).
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    tags.iter().fold(mix(master), |acc, &t| mix(acc ^ mix(t)))
}

impl RngCore for RngHandle {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
