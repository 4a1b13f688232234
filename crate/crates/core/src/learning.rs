//! Tabular Q-learning on the embedded product.

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::product::{Product, ProductAction, ProductState};
use crate::reward::RewardConfig;

/// Learning rate as a function of the visit count after increment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlphaSchedule {
    /// `α = 1 / Count`.
    InverseCount,
    /// `α = Count^-omega`, `omega ∈ (0.5, 1]`.
    Polynomial {
        omega: f64,
    },
    Constant {
        alpha: f64,
    },
}

impl AlphaSchedule {
    pub fn alpha(&self, count: u64) -> f64 {
        let n = count.max(1) as f64;
        match *self {
            AlphaSchedule::InverseCount => 1.0 / n,
            AlphaSchedule::Polynomial { omega } => n.powf(-omega),
            AlphaSchedule::Constant { alpha } => alpha,
        }
    }
}

/// Where each episode begins.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartMode {
    #[default]
    Initial,
    /// A uniformly drawn MDP state with a sampled label, full frontier.
    RandomState,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnConfig {
    pub episodes: usize,
    /// Maximum steps per episode.
    pub tau: usize,
    pub alpha: AlphaSchedule,
    /// `ε = max(1/episode, epsilon_floor)` once `episode > epsilon_floor_after`.
    pub epsilon_floor: f64,
    pub epsilon_floor_after: usize,
    pub start: StartMode,
    pub seed: u64,
    /// Converged once this many consecutive episodes each change the value
    /// map by less than `convergence_threshold`.
    pub convergence_window: usize,
    pub convergence_threshold: f64,
    /// No convergence is declared before this episode.
    pub min_episodes: usize,
    pub stop_on_convergence: bool,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            episodes: 1000,
            tau: 100,
            alpha: AlphaSchedule::Polynomial { omega: 0.51 },
            epsilon_floor: 0.01,
            epsilon_floor_after: 100,
            start: StartMode::Initial,
            seed: 0,
            convergence_window: 50,
            convergence_threshold: 1e-4,
            min_episodes: 200,
            stop_on_convergence: false,
        }
    }
}

impl LearnConfig {
    pub fn epsilon(&self, episode: usize) -> f64 {
        let e = 1.0 / episode.max(1) as f64;
        if episode > self.epsilon_floor_after {
            e.max(self.epsilon_floor)
        } else {
            e
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub actions: Vec<ProductAction>,
    pub q: Vec<f64>,
    pub count: Vec<u64>,
}

impl Row {
    fn new(actions: Vec<ProductAction>) -> Self {
        let k = actions.len();
        Row {
            actions,
            q: vec![0.0; k],
            count: vec![0; k],
        }
    }

    /// Greedy position; ties go to the lowest action.
    pub fn best(&self) -> usize {
        let mut best = 0;
        for k in 1..self.q.len() {
            if self.q[k] > self.q[best] {
                best = k;
            }
        }
        best
    }

    pub fn value(&self) -> f64 {
        self.q.iter().copied().fold(0.0, f64::max)
    }
}

/// Q-values and visit counts, keyed by product state in first-visit order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct QTable {
    pub rows: IndexMap<ProductState, Row>,
}

impl QTable {
    pub fn new() -> Self {
        QTable::default()
    }

    pub fn row_mut(&mut self, p: &Product<'_>, x: &ProductState) -> &mut Row {
        self.rows
            .entry(*x)
            .or_insert_with(|| Row::new(p.available_actions(x)))
    }

    pub fn get(&self, x: &ProductState, u: ProductAction) -> f64 {
        self.rows
            .get(x)
            .and_then(|r| r.actions.iter().position(|&a| a == u).map(|k| r.q[k]))
            .unwrap_or(0.0)
    }

    /// `max_u Q(x, u)`, zero for unseen states.
    pub fn value(&self, x: &ProductState) -> f64 {
        self.rows.get(x).map_or(0.0, Row::value)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// `Q(x,u) ← (1-α)Q(x,u) + α[r + γ·max_u' Q(x',u')]`. Returns the new value.
pub fn q_update(
    table: &mut QTable,
    p: &Product<'_>,
    x: &ProductState,
    u: ProductAction,
    r: f64,
    gamma: f64,
    next: &ProductState,
    alpha: f64,
) -> f64 {
    let target = r + gamma * table.value(next);
    let row = table.row_mut(p, x);
    let k = row
        .actions
        .iter()
        .position(|&a| a == u)
        .expect("action not available at state");
    row.q[k] = (1.0 - alpha) * row.q[k] + alpha * target;
    row.q[k]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub state: ProductState,
    pub action: ProductAction,
    pub reward: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpisodeResult {
    pub steps: usize,
    pub cumulative_reward: f64,
    /// Largest change of `max_u Q(x, ·)` caused by an update this episode.
    pub max_value_change: f64,
    pub trace: Vec<TraceStep>,
}

/// Random streams of one training session.
pub struct Streams {
    pub agent: ChaCha8Rng,
    pub env: ChaCha8Rng,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        let agent = ChaCha8Rng::seed_from_u64(seed);
        let mut env = ChaCha8Rng::seed_from_u64(seed);
        env.set_stream(1);
        Streams { agent, env }
    }
}

/// One episode of at most `tau` steps; it ends early on entering a state
/// whose return is identically zero.
pub fn run_episode(
    p: &Product<'_>,
    table: &mut QTable,
    cfg: &LearnConfig,
    reward: &RewardConfig,
    episode: usize,
    streams: &mut Streams,
    record: bool,
) -> EpisodeResult {
    let mut x = match cfg.start {
        StartMode::Initial => p.initial_state(),
        StartMode::RandomState => p.sample_start(&mut streams.env),
    };
    let eps = cfg.epsilon(episode);
    let mut out = EpisodeResult {
        steps: 0,
        cumulative_reward: 0.0,
        max_value_change: 0.0,
        trace: Vec::new(),
    };
    for _ in 0..cfg.tau {
        if p.is_hopeless(&x) {
            break;
        }
        let row = table.row_mut(p, &x);
        let k = if streams.agent.gen::<f64>() < eps {
            streams.agent.gen_range(0..row.actions.len())
        } else {
            row.best()
        };
        let u = row.actions[k];
        row.count[k] += 1;
        let alpha = cfg.alpha.alpha(row.count[k]);
        let before = row.value();
        let step = p
            .product_step(&x, u, reward, &mut streams.env)
            .expect("greedy action is available");
        q_update(
            table,
            p,
            &x,
            u,
            step.reward,
            step.discount,
            &step.next,
            alpha,
        );
        let after = table.value(&x);
        out.max_value_change = out.max_value_change.max((after - before).abs());
        out.cumulative_reward += step.reward;
        out.steps += 1;
        if record {
            out.trace.push(TraceStep {
                state: x,
                action: u,
                reward: step.reward,
            });
        }
        x = step.next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episode: usize,
    pub cumulative_reward: f64,
    pub steps: usize,
    pub value_at_x0: f64,
}

#[derive(Clone, Debug)]
pub struct TrainResult {
    pub table: QTable,
    pub curve: Vec<CurvePoint>,
    pub episodes_run: usize,
    /// Episode at which the convergence window was first satisfied.
    pub converged_at: Option<usize>,
}

pub fn train(p: &Product<'_>, cfg: &LearnConfig, reward: &RewardConfig) -> TrainResult {
    let mut table = QTable::new();
    let mut streams = Streams::new(cfg.seed);
    let mut curve = Vec::with_capacity(cfg.episodes);
    let mut quiet = 0usize;
    let mut converged_at = None;
    let x0 = p.initial_state();
    let mut episodes_run = 0;
    for episode in 1..=cfg.episodes {
        let ep = run_episode(p, &mut table, cfg, reward, episode, &mut streams, false);
        episodes_run = episode;
        curve.push(CurvePoint {
            episode,
            cumulative_reward: ep.cumulative_reward,
            steps: ep.steps,
            value_at_x0: table.value(&x0),
        });
        if ep.max_value_change < cfg.convergence_threshold {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if converged_at.is_none() && episode >= cfg.min_episodes && quiet >= cfg.convergence_window
        {
            converged_at = Some(episode);
            if cfg.stop_on_convergence {
                break;
            }
        }
    }
    TrainResult {
        table,
        curve,
        episodes_run,
        converged_at,
    }
}

/// Greedy action per visited state.
pub fn extract_policy(table: &QTable) -> IndexMap<ProductState, ProductAction> {
    table
        .rows
        .iter()
        .map(|(x, r)| (*x, r.actions[r.best()]))
        .collect()
}

pub fn extract_values(table: &QTable) -> IndexMap<ProductState, f64> {
    table.rows.iter().map(|(x, r)| (*x, r.value())).collect()
}

/// Greedy action at `x`; unvisited states take their first available
/// action, the argmax of an all-zero row.
pub fn greedy_action(p: &Product<'_>, table: &QTable, x: &ProductState) -> ProductAction {
    match table.rows.get(x) {
        Some(r) => r.actions[r.best()],
        None => p.available_actions(x)[0],
    }
}
