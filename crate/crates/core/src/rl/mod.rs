//! Tabular Q-learning over the ensemble lattice.
//!
//! START is the empty ensemble and FINISH the full pool. Each action adds one
//! predictor, and entering a state pays that state's validation F-max. After
//! training, the agent follows its greedy policy from START and keeps the
//! best-scoring ensemble on that path.

mod agent;
mod env;
mod qtable;

pub use agent::{
    choose_action, greedy_policy_path, run_episode, select_ensemble, train, EpisodeTrace,
    LearningConfig, SelectionResult, Strategy,
};
pub use env::{FnLattice, LatticeEnv, PredictorLattice, RewardCache};
pub use qtable::QTable;
