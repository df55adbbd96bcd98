//! Ensemble selection with diversity-directed Q-learning.
//!
//! Given validation and test scores of a pool of base predictors, the
//! [`rl`] module searches the lattice of predictor subsets for a small,
//! accurate ensemble. [`harness`] runs the cross-validated evaluation
//! protocol that grows the pool step by step and records ensemble-selection
//! curves.

pub mod combiner;
pub mod diversity;
mod error;
pub mod exec;
pub mod harness;
pub mod metrics;
pub mod rl;
pub mod types;

pub use error::{Error, Result};
pub use types::{EnsembleState, PredictionMatrix, RngHandle, ScoreVector, MAX_PREDICTORS};
