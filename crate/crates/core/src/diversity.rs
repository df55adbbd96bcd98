//! Pairwise diversity between prediction vectors and between neighbouring
//! ensembles of the lattice.
//!
//! Similarities are turned into diversities by taking one minus their value,
//! so identical inputs always score 0. Euclidean distance is used as is.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combiner::{combine, WeightTable};
use crate::error::{Error, Result};
use crate::types::{EnsembleState, PredictionMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiversityMeasure {
    Correlation,
    Cosine,
    Euclidean,
    YuleQ,
    Kappa,
}

impl DiversityMeasure {
    pub const ALL: [DiversityMeasure; 5] = [
        Self::Correlation,
        Self::Cosine,
        Self::Euclidean,
        Self::YuleQ,
        Self::Kappa,
    ];

    /// Whether the measure needs class labels.
    pub fn is_supervised(self) -> bool {
        matches!(self, Self::YuleQ | Self::Kappa)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Correlation => "correlation",
            Self::Cosine => "cosine",
            Self::Euclidean => "euclidean",
            Self::YuleQ => "yule",
            Self::Kappa => "kappa",
        }
    }
}

impl fmt::Display for DiversityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DiversityMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "correlation" => Ok(Self::Correlation),
            "cosine" => Ok(Self::Cosine),
            "euclidean" => Ok(Self::Euclidean),
            "yule" | "yule_q" => Ok(Self::YuleQ),
            "kappa" => Ok(Self::Kappa),
            other => Err(Error::config(
                "measure",
                format!("unknown diversity measure `{other}`"),
            )),
        }
    }
}

/// Which two vectors a transition's diversity compares.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum DiversityMethod {
    /// Combined output of the current ensemble vs. combined output of the
    /// candidate ensemble.
    #[default]
    Diversity1,
    /// Combined output of the current ensemble vs. the added predictor alone.
    Diversity2,
}

impl DiversityMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Diversity1 => "diversity1",
            Self::Diversity2 => "diversity2",
        }
    }
}

/// Denominator used by the κ statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaDenominator {
    /// `(n11+n10)(n01+n00) + (n11+n01)(n10+n00)`: the pairwise interrater κ.
    #[default]
    Standard,
    /// Product of all four marginals.
    AsPrinted,
}

/// Everything needed to evaluate one diversity measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiversitySettings {
    pub measure: DiversityMeasure,
    pub method: DiversityMethod,
    /// Binarisation cut for the supervised measures.
    pub threshold: f64,
    pub kappa_denominator: KappaDenominator,
}

impl DiversitySettings {
    pub fn new(measure: DiversityMeasure, method: DiversityMethod) -> Self {
        Self {
            measure,
            method,
            threshold: 0.5,
            kappa_denominator: KappaDenominator::Standard,
        }
    }
}

/// Joint correctness counts of two predictors. The first index refers to
/// the first predictor: `n10` counts examples only the first gets right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub n11: u64,
    pub n10: u64,
    pub n01: u64,
    pub n00: u64,
}

impl ContingencyTable {
    pub fn total(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }
}

fn same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(())
}

/// `1 - cos(a, b)`, in `[0, 2]`.
pub fn cosine_diversity(a: &[f64], b: &[f64]) -> Result<f64> {
    same_len(a, b)?;
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateVector("zero norm"));
    }
    let cos = (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0);
    Ok(1.0 - cos)
}

/// `1 - pearson(a, b)`, in `[0, 2]`.
pub fn correlation_diversity(a: &[f64], b: &[f64]) -> Result<f64> {
    same_len(a, b)?;
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        cov += dx * dy;
        va += dx * dx;
        vb += dy * dy;
    }
    if va == 0.0 || vb == 0.0 {
        return Err(Error::DegenerateVector("zero variance"));
    }
    let r = (cov / (va.sqrt() * vb.sqrt())).clamp(-1.0, 1.0);
    Ok(1.0 - r)
}

pub fn euclidean_diversity(a: &[f64], b: &[f64]) -> Result<f64> {
    same_len(a, b)?;
    Ok(a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Tallies joint correctness after binarising both vectors with `>= threshold`.
pub fn contingency(
    a: &[f64],
    b: &[f64],
    labels: &[bool],
    threshold: f64,
) -> Result<ContingencyTable> {
    same_len(a, b)?;
    if a.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} scores for {} labels",
            a.len(),
            labels.len()
        )));
    }
    let mut t = ContingencyTable::default();
    for ((&x, &y), &label) in a.iter().zip(b).zip(labels) {
        match ((x >= threshold) == label, (y >= threshold) == label) {
            (true, true) => t.n11 += 1,
            (true, false) => t.n10 += 1,
            (false, true) => t.n01 += 1,
            (false, false) => t.n00 += 1,
        }
    }
    Ok(t)
}

/// `1 - Q` with Yule's `Q = (n11 n00 - n01 n10) / (n11 n00 + n01 n10)`.
pub fn yule_q_diversity(t: &ContingencyTable) -> Result<f64> {
    let agree = t.n11 as f64 * t.n00 as f64;
    let disagree = t.n01 as f64 * t.n10 as f64;
    let denom = agree + disagree;
    if denom == 0.0 {
        return Err(Error::UndefinedStatistic);
    }
    Ok(1.0 - (agree - disagree) / denom)
}

/// `1 - κ` for the pairwise κ over the correctness table.
pub fn kappa_diversity(t: &ContingencyTable, form: KappaDenominator) -> Result<f64> {
    let [n11, n10, n01, n00] = [t.n11, t.n10, t.n01, t.n00].map(|n| n as f64);
    let denom = match form {
        KappaDenominator::Standard => (n11 + n10) * (n01 + n00) + (n11 + n01) * (n10 + n00),
        KappaDenominator::AsPrinted => (n11 + n10) * (n01 + n00) * (n11 + n01) * (n10 + n00),
    };
    if denom == 0.0 {
        return Err(Error::UndefinedStatistic);
    }
    Ok(1.0 - 2.0 * (n11 * n00 - n01 * n10) / denom)
}

/// Applies `settings.measure` to two prediction vectors.
pub fn measure_between(
    a: &[f64],
    b: &[f64],
    labels: &[bool],
    settings: &DiversitySettings,
) -> Result<f64> {
    match settings.measure {
        DiversityMeasure::Correlation => correlation_diversity(a, b),
        DiversityMeasure::Cosine => cosine_diversity(a, b),
        DiversityMeasure::Euclidean => euclidean_diversity(a, b),
        DiversityMeasure::YuleQ => {
            yule_q_diversity(&contingency(a, b, labels, settings.threshold)?)
        }
        DiversityMeasure::Kappa => kappa_diversity(
            &contingency(a, b, labels, settings.threshold)?,
            settings.kappa_denominator,
        ),
    }
}

/// Diversity across the lattice edge `current -> candidate`, where
/// `candidate` adds exactly one predictor to `current`.
pub fn pair_diversity(
    current: &EnsembleState,
    candidate: &EnsembleState,
    matrix: &PredictionMatrix,
    weights: &WeightTable,
    settings: &DiversitySettings,
) -> Result<f64> {
    let added = added_predictor(current, candidate)?;
    if current.is_empty() {
        return Err(Error::NoDiversityDefined);
    }
    let reference = combine(current, matrix, weights)?;
    match settings.method {
        DiversityMethod::Diversity1 => {
            let other = combine(candidate, matrix, weights)?;
            measure_between(&reference, &other, matrix.labels(), settings)
        }
        DiversityMethod::Diversity2 => {
            measure_between(&reference, matrix.scores(added), matrix.labels(), settings)
        }
    }
}

fn added_predictor(current: &EnsembleState, candidate: &EnsembleState) -> Result<usize> {
    let extra: Vec<usize> = candidate
        .members()
        .filter(|&p| !current.contains(p))
        .collect();
    let removed = current.members().any(|p| !candidate.contains(p));
    match (extra.as_slice(), removed) {
        ([p], false) => Ok(*p),
        _ => Err(Error::InvalidAction(format!(
            "{candidate:?} does not add exactly one predictor to {current:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn cosine_examples() {
        assert!(close(
            cosine_diversity(&[0.3, 0.7], &[0.3, 0.7]).unwrap(),
            0.0
        ));
        assert!(close(
            cosine_diversity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            1.0
        ));
        assert!(close(
            cosine_diversity(&[1.0, 1.0], &[1.0, 0.0]).unwrap(),
            1.0 - 1.0 / 2f64.sqrt()
        ));
        assert_eq!(
            cosine_diversity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::DegenerateVector("zero norm"))
        );
    }

    #[test]
    fn correlation_examples() {
        let a = [0.1, 0.5, 0.2, 0.9];
        let affine: Vec<f64> = a.iter().map(|x| 2.0 * x + 3.0).collect();
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        assert!(close(correlation_diversity(&a, &affine).unwrap(), 0.0));
        assert!(close(correlation_diversity(&a, &neg).unwrap(), 2.0));
        assert!(close(
            correlation_diversity(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0]).unwrap(),
            1.0
        ));
        assert!(matches!(
            correlation_diversity(&[0.5, 0.5], &[0.1, 0.2]),
            Err(Error::DegenerateVector(_))
        ));
    }

    #[test]
    fn euclidean_examples() {
        assert_eq!(euclidean_diversity(&[0.4, 0.1], &[0.4, 0.1]).unwrap(), 0.0);
        assert!(close(
            euclidean_diversity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(),
            2f64.sqrt()
        ));
        assert!(close(
            euclidean_diversity(&[0.5, 0.5], &[0.1, 0.9]).unwrap(),
            0.32f64.sqrt()
        ));
    }

    #[test]
    fn contingency_examples() {
        let labels = [true, false, true, false];
        let perfect = [0.9, 0.1, 0.8, 0.2];
        let wrong = [0.1, 0.9, 0.2, 0.8];
        assert_eq!(
            contingency(&perfect, &perfect, &labels, 0.5).unwrap(),
            ContingencyTable {
                n11: 4,
                ..Default::default()
            }
        );
        assert_eq!(
            contingency(&perfect, &wrong, &labels, 0.5).unwrap(),
            ContingencyTable {
                n10: 4,
                ..Default::default()
            }
        );
        let t = contingency(&[0.9, 0.2, 0.8, 0.4], &[0.6, 0.7, 0.3, 0.2], &labels, 0.5).unwrap();
        assert_eq!(
            t,
            ContingencyTable {
                n11: 2,
                n10: 2,
                n01: 0,
                n00: 0
            }
        );
    }

    #[test]
    fn yule_examples() {
        let t = |n11, n00, n01, n10| ContingencyTable { n11, n10, n01, n00 };
        assert!(close(yule_q_diversity(&t(5, 3, 0, 0)).unwrap(), 0.0));
        assert!(close(yule_q_diversity(&t(0, 0, 2, 3)).unwrap(), 2.0));
        assert!(close(yule_q_diversity(&t(3, 3, 1, 1)).unwrap(), 0.2));
        assert_eq!(
            yule_q_diversity(&t(4, 0, 0, 2)),
            Err(Error::UndefinedStatistic)
        );
    }

    #[test]
    fn kappa_examples() {
        let t = |n11, n00, n01, n10| ContingencyTable { n11, n10, n01, n00 };
        let std = KappaDenominator::Standard;
        assert!(close(kappa_diversity(&t(4, 2, 0, 0), std).unwrap(), 0.0));
        assert!(close(kappa_diversity(&t(3, 3, 1, 1), std).unwrap(), 0.5));
        assert!(close(kappa_diversity(&t(2, 2, 2, 2), std).unwrap(), 1.0));
        // Four-marginal form: 2*8 / (4*4*4*4).
        assert!(close(
            kappa_diversity(&t(3, 3, 1, 1), KappaDenominator::AsPrinted).unwrap(),
            1.0 - 16.0 / 256.0
        ));
        assert_eq!(
            kappa_diversity(&t(5, 0, 0, 0), std),
            Err(Error::UndefinedStatistic)
        );
    }

    fn pair_matrix() -> PredictionMatrix {
        PredictionMatrix::new(
            vec!["a".into(), "dup".into(), "b".into()],
            vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![true, false],
        )
        .unwrap()
    }

    fn set(m: &[usize]) -> EnsembleState {
        EnsembleState::from_members(m.iter().copied()).unwrap()
    }

    #[test]
    fn pair_diversity_examples() {
        let m = pair_matrix();
        let w = WeightTable::uniform(3);
        for method in [DiversityMethod::Diversity1, DiversityMethod::Diversity2] {
            let s = DiversitySettings::new(DiversityMeasure::Cosine, method);
            assert!(close(
                pair_diversity(&set(&[0]), &set(&[0, 1]), &m, &w, &s).unwrap(),
                0.0
            ));
        }
        let d2 = DiversitySettings::new(DiversityMeasure::Euclidean, DiversityMethod::Diversity2);
        assert!(close(
            pair_diversity(&set(&[0]), &set(&[0, 2]), &m, &w, &d2).unwrap(),
            2f64.sqrt()
        ));
        let d1 = DiversitySettings::new(DiversityMeasure::Euclidean, DiversityMethod::Diversity1);
        assert!(close(
            pair_diversity(&set(&[0]), &set(&[0, 2]), &m, &w, &d1).unwrap(),
            0.5f64.sqrt()
        ));
    }

    #[test]
    fn pair_diversity_errors() {
        let m = pair_matrix();
        let w = WeightTable::uniform(3);
        let s = DiversitySettings::new(DiversityMeasure::Cosine, DiversityMethod::Diversity1);
        assert_eq!(
            pair_diversity(&EnsembleState::START, &set(&[1]), &m, &w, &s),
            Err(Error::NoDiversityDefined)
        );
        assert!(matches!(
            pair_diversity(&set(&[0]), &set(&[0, 1, 2]), &m, &w, &s),
            Err(Error::InvalidAction(_))
        ));
    }

    #[test]
    fn diversity2_ignores_added_weight() {
        let m = pair_matrix();
        let s = DiversitySettings::new(DiversityMeasure::Cosine, DiversityMethod::Diversity2);
        let base = WeightTable::new(vec![0.7, 0.2, 0.4]).unwrap();
        let bumped = WeightTable::new(vec![0.7, 0.2, 0.9]).unwrap();
        assert_eq!(
            pair_diversity(&set(&[0, 1]), &set(&[0, 1, 2]), &m, &base, &s).unwrap(),
            pair_diversity(&set(&[0, 1]), &set(&[0, 1, 2]), &m, &bumped, &s).unwrap()
        );
    }

    #[test]
    fn measure_names_round_trip() {
        for m in DiversityMeasure::ALL {
            assert_eq!(m.name().parse::<DiversityMeasure>().unwrap(), m);
        }
        assert!("jaccard".parse::<DiversityMeasure>().is_err());
    }
}
