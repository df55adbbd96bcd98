//! The evaluation protocol: stratified cross-validation splits, pools grown
//! in random order, ensemble-selection curves with their auESC, parsimony
//! ratios against the full ensemble, and a synthetic pool generator.

mod baselines;
mod curve;
mod experiment;
mod split;
pub mod synthetic;

pub use baselines::{best_base_baseline, full_ensemble_baseline};
pub use curve::{auesc, curve_auesc, mean_stderr, parsimony_ratios, CurvePoint, ParsimonyPoint};
pub use experiment::{
    run_experiment, AlgorithmSpec, Baselines, BestEpsilon, CellReport, CurveReport, DataSummary,
    ExperimentConfig, RepetitionCurve, Report, SampleRun,
};
pub use split::{grow_pool, pool_sizes, split, Split, SplitSpec};
pub use synthetic::{generate_pool, SyntheticPoolSpec};
