//! Reward density of the tracked LDGBA against its degeneralized baseline.

use std::path::Path;

use ltlrl::automata::store_automaton;
use ltlrl::mdp::store_plmdp;
use ltlrl::product::{enumerate_product, export_product};
use serde::Serialize;

use crate::config::{EmbeddingMode, ExperimentConfig};
use crate::error::Result;
use crate::experiment::{
    create_dir, first_half_episode, run_experiment, write_json, ArtifactBundle, Setup,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeOutcome {
    pub mode: EmbeddingMode,
    pub final_mean_reward: f64,
    pub final_std_reward: f64,
    pub first_half_episode: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub repetitions: usize,
    pub episodes: usize,
    pub outcomes: Vec<ModeOutcome>,
}

impl Comparison {
    pub fn outcome(&self, mode: EmbeddingMode) -> Option<&ModeOutcome> {
        self.outcomes.iter().find(|o| o.mode == mode)
    }
}

pub const COMPARED_MODES: [EmbeddingMode; 2] = [EmbeddingMode::Eldgba, EmbeddingMode::LdbaBaseline];

/// Runs `cfg` once per mode, each under `<out>/<mode>` when `cfg.out` is set.
pub fn compare(
    cfg: &ExperimentConfig,
    modes: &[EmbeddingMode],
) -> Result<(Comparison, Vec<ArtifactBundle>)> {
    let mut bundles = Vec::new();
    let mut outcomes = Vec::new();
    for &mode in modes {
        let run = ExperimentConfig {
            mode,
            out: cfg.out.as_ref().map(|d| d.join(mode.to_string())),
            ..cfg.clone()
        };
        let b = run_experiment(&run)?;
        let last = b.aggregate.last().expect("episodes >= 1");
        outcomes.push(ModeOutcome {
            mode,
            final_mean_reward: last.mean_reward,
            final_std_reward: last.std_reward,
            first_half_episode: first_half_episode(&b.aggregate),
        });
        bundles.push(b);
    }
    let cmp = Comparison {
        repetitions: cfg.repetitions,
        episodes: cfg.learn.episodes,
        outcomes,
    };
    if let Some(dir) = &cfg.out {
        create_dir(dir)?;
        write_json(&dir.join("comparison.json"), &cmp)?;
    }
    Ok((cmp, bundles))
}

/// Writes `model.json`, `automaton.json` and `product.json` under `dir`.
pub fn export(setup: &Setup, cap: usize, dir: &Path) -> Result<usize> {
    create_dir(dir)?;
    write_json(&dir.join("model.json"), &store_plmdp(&setup.mdp))?;
    write_json(
        &dir.join("automaton.json"),
        &store_automaton(&setup.automaton),
    )?;
    let p = setup.product();
    let ep = enumerate_product(&p, cap)?;
    write_json(&dir.join("product.json"), &export_product(&p, &ep))?;
    Ok(ep.len())
}
