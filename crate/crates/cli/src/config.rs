//! The run configuration file read by `ensel select`.

use std::path::{Path, PathBuf};

use ensel_core::diversity::{DiversityMeasure, DiversityMethod, KappaDenominator};
use ensel_core::harness::{AlgorithmSpec, ExperimentConfig, SplitSpec, SyntheticPoolSpec};
use ensel_core::rl::Strategy;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub input: InputSection,
    #[serde(default)]
    pub split: SplitSpec,
    #[serde(default)]
    pub learning: LearningSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub diversity: DiversitySection,
    #[serde(default = "default_pool_step")]
    pub pool_step: usize,
    #[serde(default)]
    pub checkpoints: Vec<usize>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

fn default_pool_step() -> usize {
    10
}

fn default_repetitions() -> usize {
    10
}

/// Exactly one of `csv` and `synthetic` must be given.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    pub csv: Option<PathBuf>,
    pub synthetic: Option<SyntheticPoolSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearningSection {
    pub alpha: f64,
    pub gamma: f64,
    pub convergence_window: usize,
    pub max_episodes: usize,
}

impl Default for LearningSection {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            gamma: 0.9,
            convergence_window: 10,
            max_episodes: 1000,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub strategies: Vec<String>,
    /// Diversity measure names; `none` stands for plain random exploration.
    pub measures: Vec<String>,
    pub methods: Vec<DiversityMethod>,
    pub epsilons: Vec<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            strategies: vec!["greedy".into()],
            measures: vec!["none".into()],
            methods: vec![DiversityMethod::Diversity1],
            epsilons: vec![0.01, 0.1, 0.25, 0.5],
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiversitySection {
    pub threshold: f64,
    pub kappa_denominator: KappaDenominator,
}

impl Default for DiversitySection {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            kappa_denominator: KappaDenominator::Standard,
        }
    }
}

pub enum Input {
    Csv(PathBuf),
    Synthetic(SyntheticPoolSpec),
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    /// The data source, with a relative CSV path resolved against
    /// `base_dir`.
    pub fn input(&self, base_dir: &Path) -> Result<Input, CliError> {
        match (&self.input.csv, &self.input.synthetic) {
            (Some(csv), None) => Ok(Input::Csv(base_dir.join(csv))),
            (None, Some(spec)) => Ok(Input::Synthetic(spec.clone())),
            _ => Err(CliError::Usage(
                "invalid `input`: give exactly one of `csv` or `synthetic`".into(),
            )),
        }
    }

    pub fn algorithms(&self) -> Result<Vec<AlgorithmSpec>, CliError> {
        let mut out = Vec::new();
        for s in &self.grid.strategies {
            let strategy: Strategy = s.parse()?;
            for m in &self.grid.measures {
                if m == "none" {
                    out.push(AlgorithmSpec {
                        strategy,
                        measure: None,
                        method: DiversityMethod::Diversity1,
                    });
                    continue;
                }
                let measure: DiversityMeasure = m.parse()?;
                if strategy != Strategy::Greedy {
                    return Err(CliError::Usage(format!(
                        "invalid `grid.measures`: diversity exploration requires the greedy strategy, not {strategy}"
                    )));
                }
                for &method in &self.grid.methods {
                    out.push(AlgorithmSpec::diversity(measure, method));
                }
            }
        }
        Ok(out)
    }

    pub fn experiment(&self, seed_override: Option<u64>) -> Result<ExperimentConfig, CliError> {
        Ok(ExperimentConfig {
            split: self.split.clone(),
            algorithms: self.algorithms()?,
            epsilons: self.grid.epsilons.clone(),
            alpha: self.learning.alpha,
            gamma: self.learning.gamma,
            convergence_window: self.learning.convergence_window,
            max_episodes: self.learning.max_episodes,
            diversity_threshold: self.diversity.threshold,
            kappa_denominator: self.diversity.kappa_denominator,
            pool_step: self.pool_step,
            checkpoints: self.checkpoints.clone(),
            repetitions: self.repetitions,
            seed: seed_override.unwrap_or(self.seed),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg: RunConfigFile = toml::from_str("[input]\ncsv = \"pool.csv\"\n").unwrap();
        let exp = cfg.experiment(Some(9)).unwrap();
        assert_eq!(exp.seed, 9);
        assert_eq!(exp.algorithms, vec![AlgorithmSpec::greedy()]);
        assert_eq!(exp.epsilons, vec![0.01, 0.1, 0.25, 0.5]);
        assert!(
            matches!(cfg.input(Path::new("/d")).unwrap(), Input::Csv(p) if p == Path::new("/d/pool.csv"))
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfigFile>("bogus = 1\n[input]\ncsv = \"a\"\n").is_err());
        assert!(
            toml::from_str::<RunConfigFile>("[input]\ncsv = \"a\"\n[learning]\nbeta = 2\n")
                .is_err()
        );
    }

    #[test]
    fn grid_expansion() {
        let cfg: RunConfigFile = toml::from_str(
            r#"
            [input]
            csv = "a"
            [grid]
            measures = ["none", "cosine", "kappa"]
            methods = ["diversity1", "diversity2"]
            epsilons = [0.1]
            "#,
        )
        .unwrap();
        let names: Vec<String> = cfg.algorithms().unwrap().iter().map(|a| a.name()).collect();
        assert_eq!(
            names,
            [
                "RL_greedy",
                "RL_diversity_cosine",
                "RL_diversity_cosine_diversity2",
                "RL_diversity_kappa",
                "RL_diversity_kappa_diversity2"
            ]
        );
    }

    #[test]
    fn input_must_be_exclusive() {
        let cfg: RunConfigFile =
            toml::from_str("[input]\ncsv = \"a\"\n[input.synthetic]\nn_predictors = 3\n").unwrap();
        assert!(cfg.input(Path::new(".")).is_err());
    }
}
