//! Rollouts of a stored greedy policy.

use std::path::Path;

use ltlrl::product::{MaskDisplay, ProductState};
use ltlrl::Error as CoreError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, Result};
use crate::experiment::{create_dir, write_csv, write_json, PolicyArtifact, Setup};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub t: usize,
    pub state: String,
    pub mdp_state: String,
    /// Propositions joined by `;`.
    pub label: String,
    pub automaton_state: String,
    pub frontier: String,
    /// Accepting sets of this state, one-based.
    pub accepting: String,
    /// Action taken here; empty on the last step.
    pub action: String,
}

pub fn load_policy(path: &Path) -> Result<PolicyArtifact> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Follows `artifact` for `steps` transitions from the initial state.
pub fn simulate_policy(
    artifact: &PolicyArtifact,
    steps: usize,
    seed: u64,
) -> Result<Vec<TrajectoryStep>> {
    let setup = Setup::load(&artifact.model, &artifact.automaton, artifact.mode)?;
    let p = setup.product();
    let m = p.mdp();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let describe = |t: usize, x: &ProductState| TrajectoryStep {
        t,
        state: p.encode(x),
        mdp_state: m.state_name(x.s).to_string(),
        label: m.props().names_of(x.l).join(";"),
        automaton_state: x
            .q
            .map_or("-".to_string(), |q| p.automaton().state_name(q).to_string()),
        frontier: MaskDisplay(x.frontier).to_string(),
        accepting: MaskDisplay(p.flags(x)).to_string(),
        action: String::new(),
    };
    let mut x = p.initial_state();
    let mut out = vec![describe(0, &x)];
    for t in 1..=steps {
        let key = p.encode(&x);
        let name = artifact
            .policy
            .get(&key)
            .ok_or_else(|| CoreError::PolicyGap(key.clone()))?;
        let u = p
            .available_actions(&x)
            .into_iter()
            .find(|&u| p.action_name(&x, u) == *name)
            .ok_or_else(|| CoreError::UnavailableAction {
                state: key.clone(),
                action: name.clone(),
            })?;
        out.last_mut().expect("nonempty").action = name.clone();
        x = p.sample_next(&x, u, &mut rng)?;
        out.push(describe(t, &x));
    }
    Ok(out)
}

pub fn write_trajectory(dir: &Path, trace: &[TrajectoryStep]) -> Result<()> {
    create_dir(dir)?;
    write_csv(&dir.join("trajectory.csv"), None, trace)?;
    write_json(&dir.join("trajectory.json"), trace)
}
