use crate::combiner::{combine, WeightTable};
use crate::error::{Error, Result};
use crate::metrics::fmax;
use crate::types::{EnsembleState, PredictionMatrix};

fn pool_state(pool: &[usize], n: usize) -> Result<EnsembleState> {
    if pool.is_empty() {
        return Err(Error::InvalidEnsemble("pool is empty".into()));
    }
    let state = EnsembleState::from_members(pool.iter().copied())?;
    if !state.fits(n) || state.cardinality() != pool.len() {
        return Err(Error::InvalidEnsemble(format!("bad pool {pool:?}")));
    }
    Ok(state)
}

/// Test F-max and size of the ensemble of every pool member, weighted by
/// validation F-max.
pub fn full_ensemble_baseline(
    pool: &[usize],
    test: &PredictionMatrix,
    weights: &WeightTable,
) -> Result<(f64, usize)> {
    let state = pool_state(pool, test.n_predictors())?;
    let scores = combine(&state, test, weights)?;
    Ok((fmax(&scores, test.labels())?.fmax, pool.len()))
}

/// Test F-max of the pool member with the best validation F-max. The first
/// such member in pool order wins ties.
pub fn best_base_baseline(
    pool: &[usize],
    validation: &PredictionMatrix,
    test: &PredictionMatrix,
) -> Result<f64> {
    pool_state(pool, validation.n_predictors())?;
    let mut best: Option<(usize, f64)> = None;
    for &p in pool {
        let v = fmax(validation.scores(p), validation.labels())?.fmax;
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((p, v));
        }
    }
    let (p, _) = best.expect("non-empty pool");
    Ok(fmax(test.scores(p), test.labels())?.fmax)
}
