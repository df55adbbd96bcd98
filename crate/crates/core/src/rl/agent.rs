use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::env::{LatticeEnv, PredictorLattice};
use super::qtable::QTable;
use crate::combiner::WeightTable;
use crate::diversity::DiversitySettings;
use crate::error::{Error, Result};
use crate::types::{EnsembleState, PredictionMatrix, RngHandle};

/// Lattice search strategy. Only [`Strategy::Greedy`] has an implementation;
/// the others are reserved names.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Greedy,
    Backtrack,
    Pessimistic,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Self::Greedy => "RL_greedy",
            Self::Backtrack => "RL_backtrack",
            Self::Pessimistic => "RL_pessimistic",
        }
    }

    pub fn is_implemented(self) -> bool {
        self == Self::Greedy
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" | "RL_greedy" => Ok(Self::Greedy),
            "backtrack" | "RL_backtrack" => Ok(Self::Backtrack),
            "pessimistic" | "RL_pessimistic" => Ok(Self::Pessimistic),
            other => Err(Error::config(
                "strategy",
                format!("unknown strategy `{other}`"),
            )),
        }
    }
}

/// Q-learning parameters for one selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearningConfig {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub strategy: Strategy,
    /// Diversity-directed exploration; `None` explores uniformly at random.
    pub diversity: Option<DiversitySettings>,
    /// Consecutive identical episode picks that count as convergence.
    pub convergence_window: usize,
    pub max_episodes: usize,
    pub seed: u64,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            gamma: 0.9,
            epsilon: 0.1,
            strategy: Strategy::Greedy,
            diversity: None,
            convergence_window: 10,
            max_episodes: 1000,
            seed: 0,
        }
    }
}

impl LearningConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config("alpha", "must lie in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::config("gamma", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::config("epsilon", "must lie in [0, 1]"));
        }
        if self.convergence_window == 0 {
            return Err(Error::config("convergence_window", "must be at least 1"));
        }
        if self.max_episodes < self.convergence_window {
            return Err(Error::config(
                "max_episodes",
                "must be at least convergence_window",
            ));
        }
        if let Some(d) = &self.diversity {
            if !(0.0..=1.0).contains(&d.threshold) {
                return Err(Error::config("threshold", "must lie in [0, 1]"));
            }
        }
        if !self.strategy.is_implemented() {
            return Err(Error::UnimplementedStrategy(self.strategy.name()));
        }
        Ok(())
    }
}

/// What happened during one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace {
    /// START first, FINISH last.
    pub states: Vec<EnsembleState>,
    /// Reward received on entering `states[i + 1]`.
    pub rewards: Vec<f64>,
    /// Whether step `i` took the exploration branch.
    pub explored: Vec<bool>,
}

/// Outcome of [`select_ensemble`].
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub final_ensemble: EnsembleState,
    /// Greedy path from START to FINISH under the final Q-table.
    pub policy_path: Vec<EnsembleState>,
    /// Reward of each non-START state of `policy_path`.
    pub path_rewards: Vec<f64>,
    pub validation_fmax: f64,
    pub episodes_run: usize,
    pub converged: bool,
    /// The ensemble picked after each episode.
    pub picks: Vec<EnsembleState>,
}

/// Picks the next predictor to add with an ε-greedy rule.
///
/// Exploitation takes the best Q-value, breaking ties uniformly at random.
/// Exploration jumps to the most diverse successor when the environment can
/// rank them, otherwise to a random action other than the greedy one.
pub fn choose_action<E: LatticeEnv>(
    q: &QTable,
    env: &E,
    cursor: &E::Cursor,
    config: &LearningConfig,
    rng: &mut RngHandle,
) -> Result<(usize, bool)> {
    let n = env.pool_size();
    let state = env.state(cursor);
    let actions = state.available(n);
    match actions.len() {
        0 => {
            return Err(Error::InvalidAction(
                "no action is available at FINISH".into(),
            ))
        }
        1 => return Ok((actions[0], false)),
        _ => {}
    }
    let explore = config.epsilon > 0.0 && rng.random::<f64>() < config.epsilon;
    if explore {
        if let Some(p) = env.most_diverse(cursor, &actions)? {
            return Ok((p, true));
        }
    }
    let best = q.best_actions(&state, n);
    let greedy = *best.choose(rng).expect("at least one action");
    if !explore {
        return Ok((greedy, false));
    }
    let others: Vec<usize> = actions.into_iter().filter(|&a| a != greedy).collect();
    Ok((*others.choose(rng).expect("at least two actions"), true))
}

/// Runs one episode from START to FINISH, updating `q` after every step.
pub fn run_episode<E: LatticeEnv>(
    q: &mut QTable,
    env: &mut E,
    config: &LearningConfig,
    rng: &mut RngHandle,
) -> Result<EpisodeTrace> {
    let n = env.pool_size();
    if n == 0 {
        return Err(Error::Shape("empty predictor pool".into()));
    }
    let mut cursor = env.start();
    let mut trace = EpisodeTrace {
        states: vec![env.state(&cursor)],
        rewards: Vec::with_capacity(n),
        explored: Vec::with_capacity(n),
    };
    loop {
        let state = env.state(&cursor);
        if state.cardinality() == n {
            break;
        }
        let (action, explored) = choose_action(q, env, &cursor, config, rng)?;
        let (next, reward) = env.step(&cursor, action)?;
        let next_state = env.state(&next);
        q.update(
            state,
            action,
            reward,
            next_state,
            n,
            config.alpha,
            config.gamma,
        )?;
        trace.states.push(next_state);
        trace.rewards.push(reward);
        trace.explored.push(explored);
        cursor = next;
    }
    Ok(trace)
}

/// Follows the highest Q-value from START to FINISH, preferring the lowest
/// predictor index among ties.
pub fn greedy_policy_path(q: &QTable, pool_size: usize) -> Vec<EnsembleState> {
    let mut state = EnsembleState::START;
    let mut path = Vec::with_capacity(pool_size + 1);
    path.push(state);
    while let Some(&a) = q.best_actions(&state, pool_size).first() {
        state = state.add(a, pool_size).expect("available action");
        path.push(state);
    }
    path
}

/// Trains an agent in `env` until its episode pick is stable.
///
/// After every episode the greedy policy path is recomputed and its
/// best-reward state becomes the episode's pick (earliest state on ties).
/// Training stops once `convergence_window` consecutive picks agree, or at
/// `max_episodes` with `converged = false` and the latest pick returned.
pub fn train<E: LatticeEnv>(env: &mut E, config: &LearningConfig) -> Result<SelectionResult> {
    config.validate()?;
    let n = env.pool_size();
    if n == 0 {
        return Err(Error::Shape("empty predictor pool".into()));
    }
    let mut q = QTable::new();
    let mut rng = RngHandle::new(config.seed);
    let mut picks = Vec::new();
    let mut streak = 0usize;
    loop {
        run_episode(&mut q, env, config, &mut rng)?;
        let path = greedy_policy_path(&q, n);
        let rewards = env.path_rewards(&path)?;
        let (best_idx, _) =
            rewards
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                    if v > bv {
                        (i, v)
                    } else {
                        (bi, bv)
                    }
                });
        let pick = path[best_idx + 1];
        streak = match picks.last() {
            Some(last) if *last == pick => streak + 1,
            _ => 1,
        };
        picks.push(pick);
        let converged = streak >= config.convergence_window;
        if converged || picks.len() >= config.max_episodes {
            return Ok(SelectionResult {
                final_ensemble: pick,
                validation_fmax: rewards[best_idx],
                policy_path: path,
                path_rewards: rewards,
                episodes_run: picks.len(),
                converged,
                picks,
            });
        }
    }
}

/// Selects an ensemble from the predictors of `matrix` (validation scores)
/// using F-max rewards and `config`'s exploration rule.
pub fn select_ensemble(
    config: &LearningConfig,
    matrix: &PredictionMatrix,
    weights: &WeightTable,
) -> Result<SelectionResult> {
    config.validate()?;
    let mut env = PredictorLattice::new(matrix, weights, config.diversity)?;
    train(&mut env, config)
}
