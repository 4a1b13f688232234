//! Experiment harness over `ltlrl`: source resolution, repeated training,
//! exact cross-checks, reward-density comparison and policy rollouts.

pub mod compare;
pub mod config;
pub mod error;
pub mod experiment;
pub mod report;
pub mod simulate;
pub mod source;

pub use compare::{compare, export, Comparison, ModeOutcome, COMPARED_MODES};
pub use config::{preset, EmbeddingMode, ExperimentConfig, PRESET_NAMES};
pub use error::{CliError, Result};
pub use experiment::{run_experiment, ArtifactBundle, PolicyArtifact, Setup};
pub use report::OracleReport;
pub use simulate::{load_policy, simulate_policy, TrajectoryStep};
