//! Experiment configuration: a single TOML file with documented defaults,
//! overridable field-by-field from the command line (flags > file >
//! defaults), hashed into every output row.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use reset_core::Task;

/// Environment variable naming the output root when neither the flag nor the
/// config file sets one.
pub const OUT_DIR_ENV: &str = "RESET_OUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Expert demonstrations for the base policy.
    pub expert_demos: usize,
    /// Scripted rearrangement videos per task.
    pub human_demos: usize,
    /// Task-agnostic play episodes (shared across tasks).
    pub play_episodes: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            expert_demos: 20,
            human_demos: 20,
            play_episodes: 400,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub sigma_act: f64,
    pub sigma_obs: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            sigma_act: 0.0,
            sigma_obs: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub lambda_ridge_score: f64,
    pub lambda_ridge_base: f64,
    pub lambda_cls: f64,
    pub lambda_reg: f64,
    pub retrieval_k: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lambda_ridge_score: 1e-4,
            lambda_ridge_base: 4e-3,
            lambda_cls: 1.0,
            lambda_reg: 10.0,
            retrieval_k: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Test scenarios per task.
    pub scenarios: usize,
    /// Fraction of scenarios drawn from the shifted distribution.
    pub ood_fraction: f64,
    /// Restructuring step budget per rollout.
    pub m_max: usize,
    /// Scenes per side for threshold calibration.
    pub calibration_samples: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            scenarios: 15,
            ood_fraction: 0.8,
            m_max: reset_core::M_MAX,
            calibration_samples: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub demo_counts: Vec<usize>,
    pub seeds: Vec<u64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            demo_counts: vec![20, 40, 60, 100],
            seeds: vec![0, 1, 2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheoryConfig {
    /// Starts per distribution for the covariance-trace comparison.
    pub n_anchor: usize,
    /// Fresh draws for the expected-loss estimate.
    pub n_gap_test: usize,
    /// Samples for the mutual-information estimates.
    pub n_mi: usize,
    pub mi_bins: usize,
}

impl Default for TheoryConfig {
    fn default() -> Self {
        TheoryConfig {
            n_anchor: 1000,
            n_gap_test: 1000,
            n_mi: 2000,
            mi_bins: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    /// Task names; defaults to all four.
    pub tasks: Vec<String>,
    /// Output root; flag and environment override.
    pub out_dir: Option<PathBuf>,
    pub data: DataConfig,
    pub noise: NoiseConfig,
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub sweep: SweepConfig,
    pub theory: TheoryConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 42,
            tasks: Task::ALL.iter().map(|t| t.name().to_string()).collect(),
            out_dir: None,
            data: DataConfig::default(),
            noise: NoiseConfig::default(),
            train: TrainConfig::default(),
            eval: EvalConfig::default(),
            sweep: SweepConfig::default(),
            theory: TheoryConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let cfg: ExperimentConfig =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.eval.ood_fraction) {
            bail!("eval.ood_fraction must lie in [0, 1]");
        }
        for (name, v) in [
            ("data.expert_demos", self.data.expert_demos),
            ("data.human_demos", self.data.human_demos),
            ("data.play_episodes", self.data.play_episodes),
            ("eval.scenarios", self.eval.scenarios),
            ("eval.calibration_samples", self.eval.calibration_samples),
            ("theory.n_anchor", self.theory.n_anchor),
            ("theory.n_gap_test", self.theory.n_gap_test),
            ("theory.n_mi", self.theory.n_mi),
        ] {
            if v < 1 {
                bail!("{name} must be at least 1");
            }
        }
        if self.theory.mi_bins < 2 {
            bail!("theory.mi_bins must be at least 2");
        }
        for task in &self.tasks {
            self.parse_task(task)?;
        }
        Ok(())
    }

    fn parse_task(&self, name: &str) -> Result<Task> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == name)
            .with_context(|| format!("unknown task {name}"))
    }

    pub fn task_list(&self) -> Result<Vec<Task>> {
        self.tasks.iter().map(|t| self.parse_task(t)).collect()
    }

    pub fn theta(&self) -> reset_core::Theta {
        reset_core::Theta {
            sigma_act: self.noise.sigma_act,
            sigma_obs: self.noise.sigma_obs,
            ..reset_core::Theta::default()
        }
    }

    /// Stable short hash of the full configuration.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        hex[..12].to_string()
    }

    /// Resolve the output root: explicit flag, then config file, then the
    /// environment variable, then `./out`.
    pub fn resolve_out_dir(&self, flag: Option<&Path>) -> PathBuf {
        if let Some(p) = flag {
            return p.to_path_buf();
        }
        if let Some(p) = &self.out_dir {
            return p.clone();
        }
        if let Ok(p) = std::env::var(OUT_DIR_ENV) {
            if !p.is_empty() {
                return PathBuf::from(p);
            }
        }
        PathBuf::from("out")
    }
}

/// Field-level command-line overrides (flags beat the file, which beats the
/// built-in defaults).
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tasks: Option<Vec<String>>,
    pub expert_demos: Option<usize>,
    pub human_demos: Option<usize>,
    pub play_episodes: Option<usize>,
    pub scenarios: Option<usize>,
    pub ood_fraction: Option<f64>,
    pub sigma_act: Option<f64>,
    pub sigma_obs: Option<f64>,
}

pub fn load_config(file: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match file {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = overrides.seed {
        cfg.seed = v;
    }
    if let Some(v) = &overrides.tasks {
        cfg.tasks = v.clone();
    }
    if let Some(v) = overrides.expert_demos {
        cfg.data.expert_demos = v;
    }
    if let Some(v) = overrides.human_demos {
        cfg.data.human_demos = v;
    }
    if let Some(v) = overrides.play_episodes {
        cfg.data.play_episodes = v;
    }
    if let Some(v) = overrides.scenarios {
        cfg.eval.scenarios = v;
    }
    if let Some(v) = overrides.ood_fraction {
        cfg.eval.ood_fraction = v;
    }
    if let Some(v) = overrides.sigma_act {
        cfg.noise.sigma_act = v;
    }
    if let Some(v) = overrides.sigma_obs {
        cfg.noise.sigma_obs = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_hash_stably() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 12);
    }

    #[test]
    fn file_overrides_defaults_and_flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "seed = 7\n[eval]\nscenarios = 30\n").unwrap();
        let cfg = load_config(Some(&path), &Overrides::default()).unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.eval.scenarios, 30);
        assert_eq!(cfg.data.expert_demos, 20);

        let over = Overrides {
            scenarios: Some(99),
            ..Overrides::default()
        };
        let cfg2 = load_config(Some(&path), &over).unwrap();
        assert_eq!(cfg2.eval.scenarios, 99);
        assert_ne!(cfg.hash(), cfg2.hash());
    }

    #[test]
    fn bad_fields_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        std::fs::write(&path, "[eval]\nood_fraction = 1.5\n").unwrap();
        assert!(load_config(Some(&path), &Overrides::default()).is_err());

        std::fs::write(&path, "unknown_knob = 1\n").unwrap();
        assert!(load_config(Some(&path), &Overrides::default()).is_err());

        std::fs::write(&path, "tasks = [\"no_such_task\"]\n").unwrap();
        assert!(load_config(Some(&path), &Overrides::default()).is_err());
    }
}
