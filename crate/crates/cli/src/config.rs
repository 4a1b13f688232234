use std::fmt;
use std::path::{Path, PathBuf};

use ltlrl::automata::{degeneralize, Ldgba};
use ltlrl::embedding::ResetMode;
use ltlrl::learning::{LearnConfig, StartMode};
use ltlrl::reward::RewardConfig;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, Result};
use crate::source::{automaton_source_exists, model_source_exists};

/// How the task automaton enters the product.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "kebab-case")]
pub enum EmbeddingMode {
    /// The LDGBA with a tracking frontier.
    #[default]
    Eldgba,
    /// The degeneralized single-set automaton with a tracking frontier.
    LdbaBaseline,
    /// The LDGBA with the frontier held at the full set: the standard product.
    FrozenFrontier,
}

impl EmbeddingMode {
    pub fn reset_mode(self) -> ResetMode {
        match self {
            EmbeddingMode::Eldgba | EmbeddingMode::LdbaBaseline => ResetMode::Immediate,
            EmbeddingMode::FrozenFrontier => ResetMode::Frozen,
        }
    }

    pub fn prepare(self, a: Ldgba) -> Ldgba {
        match self {
            EmbeddingMode::LdbaBaseline => degeneralize(&a),
            _ => a,
        }
    }
}

impl fmt::Display for EmbeddingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbeddingMode::Eldgba => "eldgba",
            EmbeddingMode::LdbaBaseline => "ldba-baseline",
            EmbeddingMode::FrozenFrontier => "frozen-frontier",
        })
    }
}

pub const DEFAULT_ORACLE_CAP: usize = 200_000;

fn one() -> usize {
    1
}

fn default_cap() -> usize {
    DEFAULT_ORACLE_CAP
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// File path or built-in model name.
    pub model: String,
    /// File path or built-in automaton name.
    pub automaton: String,
    #[serde(default)]
    pub mode: EmbeddingMode,
    #[serde(default)]
    pub learn: LearnConfig,
    #[serde(default)]
    pub reward: RewardConfig,
    /// Repetition `i` trains with seed `learn.seed + i`.
    #[serde(default = "one")]
    pub repetitions: usize,
    /// Never serialized, so artifacts do not depend on where they are written.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    /// Product state budget for exact analysis.
    #[serde(default = "default_cap")]
    pub oracle_cap: usize,
}

impl ExperimentConfig {
    pub fn new(model: impl Into<String>, automaton: impl Into<String>) -> Self {
        ExperimentConfig {
            model: model.into(),
            automaton: automaton.into(),
            mode: EmbeddingMode::default(),
            learn: LearnConfig::default(),
            reward: RewardConfig::default(),
            repetitions: 1,
            out: None,
            oracle_cap: DEFAULT_ORACLE_CAP,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if !model_source_exists(&self.model) {
            return Err(CliError::Source(self.model.clone()));
        }
        if !automaton_source_exists(&self.automaton) {
            return Err(CliError::Source(self.automaton.clone()));
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.learn.tau == 0 {
            return bad("tau must be at least 1".into());
        }
        if self.learn.episodes == 0 {
            return bad("episodes must be at least 1".into());
        }
        if !self.reward.is_valid() {
            return bad(format!(
                "r_f and gamma_f must lie in (0, 1), got {:?}",
                self.reward
            ));
        }
        if !(0.0..=1.0).contains(&self.learn.epsilon_floor) {
            return bad(format!(
                "epsilon_floor {} outside [0, 1]",
                self.learn.epsilon_floor
            ));
        }
        let probe = self.learn.alpha.alpha(1);
        if !(probe > 0.0 && probe <= 1.0) {
            return bad(format!("learning rate {probe} outside (0, 1]"));
        }
        Ok(())
    }
}

pub const PRESET_NAMES: [&str; 7] = [
    "example",
    "phi_case1",
    "phi_case2",
    "phi_case3",
    "scale15",
    "scale25",
    "scale40",
];

/// Named experiment settings for the benchmark workspaces.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "example" => ExperimentConfig::new("fig1", "phi_e"),
        "phi_case1" => {
            let mut c = ExperimentConfig::new("case1", "phi_case1");
            c.learn.episodes = 20_000;
            c.learn.start = StartMode::RandomState;
            c.learn.epsilon_floor = 0.25;
            c
        }
        "phi_case2" => {
            let mut c = ExperimentConfig::new("case2", "phi_case2");
            c.repetitions = 100;
            c
        }
        "phi_case3" => {
            let mut c = ExperimentConfig::new("case2", "phi_case3");
            c.learn.tau = 800;
            c
        }
        "scale15" | "scale25" | "scale40" => {
            let (n, tau) = match name {
                "scale15" => (15, 800),
                "scale25" => (25, 2000),
                _ => (40, 5000),
            };
            let mut c = ExperimentConfig::new(format!("case2:{n}"), "phi_case2");
            c.learn.tau = tau;
            c.learn.episodes = 3000;
            c.learn.stop_on_convergence = true;
            c
        }
        _ => return Err(CliError::Preset(name.to_string())),
    };
    Ok(cfg)
}
