//! Cross-validated ensemble-selection experiments over growing pools.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::baselines::{best_base_baseline, full_ensemble_baseline};
use super::curve::{curve_auesc, mean_stderr, parsimony_ratios, CurvePoint, ParsimonyPoint};
use super::split::{grow_pool, pool_sizes, split, SplitSpec};
use crate::combiner::{combine, compute_weights, WeightTable};
use crate::diversity::{DiversityMeasure, DiversityMethod, DiversitySettings, KappaDenominator};
use crate::error::{Error, Result};
use crate::exec::{map_units, Execution};
use crate::metrics::fmax;
use crate::rl::{select_ensemble, LearningConfig, Strategy};
use crate::types::{derive_seed, PredictionMatrix, RngHandle};

const POOL_ORDER_TAG: u64 = 0x706f_6f6c;

/// A selection algorithm: a lattice strategy plus an optional diversity
/// measure steering exploration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub measure: Option<DiversityMeasure>,
    #[serde(default)]
    pub method: DiversityMethod,
}

impl AlgorithmSpec {
    pub fn greedy() -> Self {
        Self {
            strategy: Strategy::Greedy,
            measure: None,
            method: DiversityMethod::Diversity1,
        }
    }

    pub fn diversity(measure: DiversityMeasure, method: DiversityMethod) -> Self {
        Self {
            strategy: Strategy::Greedy,
            measure: Some(measure),
            method,
        }
    }

    /// `RL_greedy`, `RL_diversity_cosine`, `RL_diversity_cosine_diversity2`, ...
    pub fn name(&self) -> String {
        match self.measure {
            None => self.strategy.name().to_string(),
            Some(m) => match self.method {
                DiversityMethod::Diversity1 => format!("RL_diversity_{m}"),
                DiversityMethod::Diversity2 => format!("RL_diversity_{m}_diversity2"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub split: SplitSpec,
    pub algorithms: Vec<AlgorithmSpec>,
    pub epsilons: Vec<f64>,
    pub alpha: f64,
    pub gamma: f64,
    pub convergence_window: usize,
    pub max_episodes: usize,
    /// Binarisation cut used by the supervised diversity measures.
    pub diversity_threshold: f64,
    pub kappa_denominator: KappaDenominator,
    pub pool_step: usize,
    pub checkpoints: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            split: SplitSpec::default(),
            algorithms: vec![AlgorithmSpec::greedy()],
            epsilons: vec![0.01, 0.1, 0.25, 0.5],
            alpha: 0.1,
            gamma: 0.9,
            convergence_window: 10,
            max_episodes: 1000,
            diversity_threshold: 0.5,
            kappa_denominator: KappaDenominator::Standard,
            pool_step: 10,
            checkpoints: Vec::new(),
            repetitions: 10,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self, n_predictors: usize) -> Result<()> {
        self.split.validate()?;
        if self.algorithms.is_empty() {
            return Err(Error::config(
                "algorithms",
                "at least one algorithm is required",
            ));
        }
        let mut names = BTreeSet::new();
        for a in &self.algorithms {
            if !a.strategy.is_implemented() {
                return Err(Error::UnimplementedStrategy(a.strategy.name()));
            }
            if !names.insert(a.name()) {
                return Err(Error::config(
                    "algorithms",
                    format!("duplicate algorithm {}", a.name()),
                ));
            }
        }
        if self.epsilons.is_empty() {
            return Err(Error::config("epsilons", "at least one value is required"));
        }
        for &epsilon in &self.epsilons {
            self.learning(AlgorithmSpec::greedy(), epsilon, 0)
                .validate()
                .map_err(|e| match e {
                    Error::Config {
                        field: "epsilon",
                        reason,
                    } => Error::config("epsilons", reason),
                    other => other,
                })?;
        }
        if !(0.0..=1.0).contains(&self.diversity_threshold) {
            return Err(Error::config("diversity_threshold", "must lie in [0, 1]"));
        }
        if self.pool_step == 0 {
            return Err(Error::config("pool_step", "must be at least 1"));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions", "must be at least 1"));
        }
        let sizes = pool_sizes(n_predictors, self.pool_step);
        if let Some(k) = self.checkpoints.iter().find(|k| !sizes.contains(k)) {
            return Err(Error::config(
                "checkpoints",
                format!("pool size {k} is not among the measured sizes {sizes:?}"),
            ));
        }
        Ok(())
    }

    fn learning(&self, algorithm: AlgorithmSpec, epsilon: f64, seed: u64) -> LearningConfig {
        LearningConfig {
            alpha: self.alpha,
            gamma: self.gamma,
            epsilon,
            strategy: algorithm.strategy,
            diversity: algorithm.measure.map(|measure| DiversitySettings {
                measure,
                method: algorithm.method,
                threshold: self.diversity_threshold,
                kappa_denominator: self.kappa_denominator,
            }),
            convergence_window: self.convergence_window,
            max_episodes: self.max_episodes,
            seed,
        }
    }

    fn cells(&self) -> Vec<(AlgorithmSpec, f64)> {
        self.algorithms
            .iter()
            .flat_map(|&a| self.epsilons.iter().map(move |&e| (a, e)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub n_predictors: usize,
    pub n_examples: usize,
    pub n_positives: usize,
}

/// Fold-averaged results of one repetition, one entry per pool size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionCurve {
    pub test_fmax: Vec<f64>,
    pub mean_size: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub points: Vec<CurvePoint>,
    pub auesc: f64,
    pub repetitions: Vec<RepetitionCurve>,
}

impl CurveReport {
    fn from_repetitions(pool_sizes: &[usize], repetitions: Vec<RepetitionCurve>) -> Result<Self> {
        let points = pool_sizes
            .iter()
            .enumerate()
            .map(|(j, &pool_size)| {
                let perf: Vec<f64> = repetitions.iter().map(|r| r.test_fmax[j]).collect();
                let size: Vec<f64> = repetitions.iter().map(|r| r.mean_size[j]).collect();
                let (mean, stderr) = mean_stderr(&perf);
                CurvePoint {
                    pool_size,
                    mean,
                    stderr,
                    mean_size: mean_stderr(&size).0,
                }
            })
            .collect::<Vec<_>>();
        Ok(Self {
            auesc: curve_auesc(&points)?,
            points,
            repetitions,
        })
    }
}

/// One selection run kept verbatim for inspection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRun {
    pub repetition: usize,
    pub fold: usize,
    pub pool_size: usize,
    /// Predictor ids in the order the greedy policy adds them.
    pub policy_order: Vec<String>,
    /// The selected ensemble is the first `final_size` entries of
    /// `policy_order`.
    pub final_size: usize,
    pub validation_fmax: f64,
    pub test_fmax: f64,
    pub episodes: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub algorithm: String,
    pub spec: AlgorithmSpec,
    pub epsilon: f64,
    pub curve: CurveReport,
    pub parsimony: Vec<ParsimonyPoint>,
    pub runs: usize,
    pub non_converged: usize,
    pub mean_episodes: f64,
    pub sample_run: SampleRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestEpsilon {
    pub algorithm: String,
    pub epsilon: f64,
    pub auesc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    pub full_ensemble: CurveReport,
    pub best_base: CurveReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub data: DataSummary,
    pub config: ExperimentConfig,
    pub pool_sizes: Vec<usize>,
    pub baselines: Baselines,
    pub cells: Vec<CellReport>,
    pub best_epsilon: Vec<BestEpsilon>,
}

impl Report {
    /// The cell of `algorithm` at its best ε.
    pub fn best_cell(&self, algorithm: &str) -> Option<&CellReport> {
        let best = self
            .best_epsilon
            .iter()
            .find(|b| b.algorithm == algorithm)?;
        self.cells
            .iter()
            .find(|c| c.algorithm == algorithm && c.epsilon == best.epsilon)
    }
}

struct FoldData {
    validation: PredictionMatrix,
    test: PredictionMatrix,
    weights: WeightTable,
}

struct RunOutcome {
    test_fmax: f64,
    size: usize,
    validation_fmax: f64,
    episodes: usize,
    converged: bool,
    policy_order: Vec<usize>,
}

#[derive(Clone, Copy)]
struct Unit {
    cell: usize,
    rep: usize,
    fold: usize,
    pool: usize,
}

/// Runs every grid cell over all repetitions, folds and pool sizes.
///
/// Each repetition draws its own random predictor order; folds share one
/// stratified split. Fold results are averaged within a repetition and
/// standard errors are taken across repetitions. Every selection run gets a
/// seed derived from `(seed, cell, repetition, fold, pool)`, so the report
/// does not depend on `exec`.
pub fn run_experiment(
    config: &ExperimentConfig,
    matrix: &PredictionMatrix,
    exec: Execution,
) -> Result<Report> {
    let n = matrix.n_predictors();
    config.validate(n)?;
    let sizes = pool_sizes(n, config.pool_step);
    let fold_ids: Vec<usize> = (0..config.split.folds).collect();
    let folds = map_units(exec, &fold_ids, |&f| -> Result<FoldData> {
        let s = split(matrix.labels(), &config.split, f)?;
        let validation = matrix.select_examples(&s.validation)?;
        let test = matrix.select_examples(&s.test)?;
        let weights = compute_weights(&validation)?;
        Ok(FoldData {
            validation,
            test,
            weights,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let all: Vec<usize> = (0..n).collect();
    let pools: Vec<Vec<Vec<usize>>> = (0..config.repetitions)
        .map(|r| {
            let mut rng = RngHandle::new(derive_seed(config.seed, &[POOL_ORDER_TAG, r as u64]));
            grow_pool(&all, config.pool_step, &mut rng)
        })
        .collect::<Result<_>>()?;

    // Baselines, one unit per (repetition, fold, pool).
    let base_units: Vec<Unit> = units(1, config.repetitions, folds.len(), sizes.len());
    let base = map_units(exec, &base_units, |u| -> Result<(f64, f64)> {
        let fd = &folds[u.fold];
        let pool = &pools[u.rep][u.pool];
        let (fe, _) = full_ensemble_baseline(pool, &fd.test, &fd.weights)?;
        let best = best_base_baseline(pool, &fd.validation, &fd.test)?;
        Ok((fe, best))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let fe_curve = fold_average(config.repetitions, folds.len(), &sizes, |r, f, j| {
        let (fe, _) = base[index(r, f, j, folds.len(), sizes.len())];
        (fe, sizes[j] as f64)
    });
    let best_curve = fold_average(config.repetitions, folds.len(), &sizes, |r, f, j| {
        let (_, best) = base[index(r, f, j, folds.len(), sizes.len())];
        (best, 1.0)
    });
    let baselines = Baselines {
        full_ensemble: CurveReport::from_repetitions(&sizes, fe_curve)?,
        best_base: CurveReport::from_repetitions(&sizes, best_curve)?,
    };

    let cells = config.cells();
    let run_units = units(cells.len(), config.repetitions, folds.len(), sizes.len());
    let outcomes = map_units(exec, &run_units, |u| -> Result<RunOutcome> {
        let (algorithm, epsilon) = cells[u.cell];
        let seed = derive_seed(
            config.seed,
            &[u.cell as u64, u.rep as u64, u.fold as u64, u.pool as u64],
        );
        run_unit(
            &config.learning(algorithm, epsilon, seed),
            &folds[u.fold],
            &pools[u.rep][u.pool],
        )
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let per_cell = config.repetitions * folds.len() * sizes.len();
    let mut cell_reports = Vec::with_capacity(cells.len());
    for (c, &(algorithm, epsilon)) in cells.iter().enumerate() {
        let chunk = &outcomes[c * per_cell..(c + 1) * per_cell];
        let reps = fold_average(config.repetitions, folds.len(), &sizes, |r, f, j| {
            let o = &chunk[index(r, f, j, folds.len(), sizes.len())];
            (o.test_fmax, o.size as f64)
        });
        let curve = CurveReport::from_repetitions(&sizes, reps)?;
        let parsimony = parsimony_ratios(
            &curve.points,
            &baselines.full_ensemble.points,
            &config.checkpoints,
        )?;
        let last = sizes.len() - 1;
        let sample = &chunk[index(0, 0, last, folds.len(), sizes.len())];
        let ids = matrix.ids();
        let pool = &pools[0][last];
        cell_reports.push(CellReport {
            algorithm: algorithm.name(),
            spec: algorithm,
            epsilon,
            curve,
            parsimony,
            runs: chunk.len(),
            non_converged: chunk.iter().filter(|o| !o.converged).count(),
            mean_episodes: chunk.iter().map(|o| o.episodes as f64).sum::<f64>()
                / chunk.len() as f64,
            sample_run: SampleRun {
                repetition: 0,
                fold: 0,
                pool_size: sizes[last],
                policy_order: sample
                    .policy_order
                    .iter()
                    .map(|&p| ids[pool[p]].clone())
                    .collect(),
                final_size: sample.size,
                validation_fmax: sample.validation_fmax,
                test_fmax: sample.test_fmax,
                episodes: sample.episodes,
                converged: sample.converged,
            },
        });
    }

    let mut best_epsilon: Vec<BestEpsilon> = Vec::new();
    for cell in &cell_reports {
        match best_epsilon
            .iter_mut()
            .find(|b| b.algorithm == cell.algorithm)
        {
            Some(b) if cell.curve.auesc > b.auesc => {
                b.epsilon = cell.epsilon;
                b.auesc = cell.curve.auesc;
            }
            Some(_) => {}
            None => best_epsilon.push(BestEpsilon {
                algorithm: cell.algorithm.clone(),
                epsilon: cell.epsilon,
                auesc: cell.curve.auesc,
            }),
        }
    }

    Ok(Report {
        data: DataSummary {
            n_predictors: n,
            n_examples: matrix.n_examples(),
            n_positives: matrix.n_positives(),
        },
        config: config.clone(),
        pool_sizes: sizes,
        baselines,
        cells: cell_reports,
        best_epsilon,
    })
}

fn run_unit(learning: &LearningConfig, fold: &FoldData, pool: &[usize]) -> Result<RunOutcome> {
    let validation = fold.validation.select_predictors(pool)?;
    let test = fold.test.select_predictors(pool)?;
    let weights = fold.weights.select(pool);
    let result = select_ensemble(learning, &validation, &weights)?;
    let scores = combine(&result.final_ensemble, &test, &weights)?;
    let policy_order = result
        .policy_path
        .windows(2)
        .map(|w| {
            w[1].members()
                .find(|&p| !w[0].contains(p))
                .expect("policy path grows by one predictor")
        })
        .collect();
    Ok(RunOutcome {
        test_fmax: fmax(&scores, test.labels())?.fmax,
        size: result.final_ensemble.cardinality(),
        validation_fmax: result.validation_fmax,
        episodes: result.episodes_run,
        converged: result.converged,
        policy_order,
    })
}

fn units(cells: usize, reps: usize, folds: usize, pools: usize) -> Vec<Unit> {
    let mut out = Vec::with_capacity(cells * reps * folds * pools);
    for cell in 0..cells {
        for rep in 0..reps {
            for fold in 0..folds {
                for pool in 0..pools {
                    out.push(Unit {
                        cell,
                        rep,
                        fold,
                        pool,
                    });
                }
            }
        }
    }
    out
}

fn index(rep: usize, fold: usize, pool: usize, folds: usize, pools: usize) -> usize {
    (rep * folds + fold) * pools + pool
}

fn fold_average(
    reps: usize,
    folds: usize,
    sizes: &[usize],
    value: impl Fn(usize, usize, usize) -> (f64, f64),
) -> Vec<RepetitionCurve> {
    (0..reps)
        .map(|r| {
            let (perf, size): (Vec<f64>, Vec<f64>) = (0..sizes.len())
                .map(|j| {
                    let (p, s) = (0..folds).fold((0.0, 0.0), |(ap, as_), f| {
                        let (p, s) = value(r, f, j);
                        (ap + p, as_ + s)
                    });
                    (p / folds as f64, s / folds as f64)
                })
                .unzip();
            RepetitionCurve {
                test_fmax: perf,
                mean_size: size,
            }
        })
        .collect()
}
