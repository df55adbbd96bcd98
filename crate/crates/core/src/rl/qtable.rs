use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::types::EnsembleState;

/// Sparse action-value table. Absent entries read as 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QTable {
    entries: HashMap<(EnsembleState, u16), f64>,
}

impl QTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, state: &EnsembleState, action: usize) -> f64 {
        self.entries
            .get(&(*state, action as u16))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn set(&mut self, state: EnsembleState, action: usize, value: f64) {
        self.entries.insert((state, action as u16), value);
    }

    /// Number of stored state-action pairs.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EnsembleState, usize, f64)> + '_ {
        self.entries.iter().map(|(&(s, a), &v)| (s, a as usize, v))
    }

    /// `max_a Q(state, a)` over the actions still available; 0 at FINISH.
    pub fn max_value(&self, state: &EnsembleState, pool_size: usize) -> f64 {
        (0..pool_size)
            .filter(|&a| !state.contains(a))
            .map(|a| self.get(state, a))
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
            .unwrap_or(0.0)
    }

    /// All available actions attaining the maximum Q-value, ascending.
    pub fn best_actions(&self, state: &EnsembleState, pool_size: usize) -> Vec<usize> {
        let mut best = Vec::new();
        let mut top = f64::NEG_INFINITY;
        for a in (0..pool_size).filter(|&a| !state.contains(a)) {
            let v = self.get(state, a);
            if v > top {
                top = v;
                best.clear();
                best.push(a);
            } else if v == top {
                best.push(a);
            }
        }
        best
    }

    /// One Watkins Q-learning update of the entry `(state, action)`:
    /// `Q <- Q + alpha * (reward + gamma * max_a' Q(next, a') - Q)`.
    #[allow(clippy::too_many_arguments)]
    pub fn update(
        &mut self,
        state: EnsembleState,
        action: usize,
        reward: f64,
        next: EnsembleState,
        pool_size: usize,
        alpha: f64,
        gamma: f64,
    ) -> Result<f64> {
        if state.add(action, pool_size)? != next {
            return Err(Error::InvalidAction(format!(
                "{next:?} is not reached from {state:?} by adding {action}"
            )));
        }
        let old = self.get(&state, action);
        let target = reward + gamma * self.max_value(&next, pool_size);
        let value = old + alpha * (target - old);
        self.set(state, action, value);
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(m: &[usize]) -> EnsembleState {
        EnsembleState::from_members(m.iter().copied()).unwrap()
    }

    #[test]
    fn single_step_update() {
        let mut q = QTable::new();
        let v = q
            .update(set(&[0]), 1, 0.6, set(&[0, 1]), 3, 0.1, 0.9)
            .unwrap();
        assert!((v - 0.06).abs() < 1e-15);
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn zero_reward_is_fixed_point() {
        let mut q = QTable::new();
        q.update(EnsembleState::START, 2, 0.0, set(&[2]), 3, 0.1, 0.9)
            .unwrap();
        assert_eq!(q.get(&EnsembleState::START, 2), 0.0);
    }

    #[test]
    fn terminal_updates_converge_to_reward() {
        let mut q = QTable::new();
        for _ in 0..200 {
            q.update(set(&[0, 1]), 2, 0.8, set(&[0, 1, 2]), 3, 0.1, 0.9)
                .unwrap();
        }
        // Residual is 0.8 * 0.9^200.
        assert!((q.get(&set(&[0, 1]), 2) - 0.8).abs() < 1e-6);
    }

    #[test]
    fn only_updated_entry_changes() {
        let mut q = QTable::new();
        q.set(set(&[1]), 0, 0.5);
        q.set(set(&[0, 1]), 2, 0.4);
        q.update(set(&[1]), 2, 0.2, set(&[1, 2]), 3, 0.5, 0.9)
            .unwrap();
        assert_eq!(q.get(&set(&[1]), 0), 0.5);
        assert_eq!(q.get(&set(&[0, 1]), 2), 0.4);
        // max over {1,2}: only action 0 remains, absent -> 0.
        assert!((q.get(&set(&[1]), 2) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn invalid_transitions() {
        let mut q = QTable::new();
        assert!(q.update(set(&[0]), 0, 1.0, set(&[0]), 3, 0.1, 0.9).is_err());
        assert!(q
            .update(set(&[0]), 1, 1.0, set(&[0, 2]), 3, 0.1, 0.9)
            .is_err());
        assert!(q.is_empty());
    }

    #[test]
    fn best_actions_and_max() {
        let mut q = QTable::new();
        let s = set(&[1]);
        assert_eq!(q.best_actions(&s, 4), vec![0, 2, 3]);
        q.set(s, 3, 0.3);
        q.set(s, 0, 0.3);
        assert_eq!(q.best_actions(&s, 4), vec![0, 3]);
        assert_eq!(q.max_value(&s, 4), 0.3);
        assert_eq!(q.max_value(&set(&[0, 1, 2, 3]), 4), 0.0);
    }
}
