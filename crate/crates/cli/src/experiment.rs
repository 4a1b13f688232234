//! Repeated training runs and their artifact bundle.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ltlrl::automata::Ldgba;
use ltlrl::learning::{greedy_action, train, CurvePoint, QTable, TrainResult};
use ltlrl::mdp::{cell_of_state_name, PlMdp};
use ltlrl::product::{Product, ProductState};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{EmbeddingMode, ExperimentConfig};
use crate::error::{io_err, Result};
use crate::report::{analyse, oracle_report, Analysis, OracleReport};
use crate::source::{load_automaton_source, load_model};

/// A loaded model and the automaton as it enters the product.
pub struct Setup {
    pub mdp: PlMdp,
    pub automaton: Ldgba,
    pub mode: EmbeddingMode,
}

impl Setup {
    pub fn load(model: &str, automaton: &str, mode: EmbeddingMode) -> Result<Self> {
        let mdp = load_model(model)?;
        let automaton = mode.prepare(load_automaton_source(automaton)?);
        Ok(Setup {
            mdp,
            automaton,
            mode,
        })
    }

    pub fn product(&self) -> Product<'_> {
        Product::new(&self.mdp, &self.automaton, self.mode.reset_mode())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub episode: usize,
    /// Repetitions that ran this episode.
    pub n: usize,
    pub mean_reward: f64,
    pub std_reward: f64,
    pub mean_steps: f64,
    pub mean_value_at_x0: f64,
    pub std_value_at_x0: f64,
}

/// Mean and population standard deviation.
fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn aggregate(curves: &[Vec<CurvePoint>]) -> Vec<AggregateRow> {
    let len = curves.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|i| {
            let pts: Vec<&CurvePoint> = curves.iter().filter_map(|c| c.get(i)).collect();
            let rewards: Vec<f64> = pts.iter().map(|p| p.cumulative_reward).collect();
            let values: Vec<f64> = pts.iter().map(|p| p.value_at_x0).collect();
            let (mean_reward, std_reward) = mean_std(&rewards);
            let (mean_value_at_x0, std_value_at_x0) = mean_std(&values);
            AggregateRow {
                episode: i + 1,
                n: pts.len(),
                mean_reward,
                std_reward,
                mean_steps: pts.iter().map(|p| p.steps as f64).sum::<f64>() / pts.len() as f64,
                mean_value_at_x0,
                std_value_at_x0,
            }
        })
        .collect()
}

/// First episode whose mean reward reaches half the final mean; `None` when
/// the final mean is zero.
pub fn first_half_episode(rows: &[AggregateRow]) -> Option<usize> {
    let last = rows.last()?.mean_reward;
    if last <= 0.0 {
        return None;
    }
    rows.iter()
        .find(|r| r.mean_reward >= 0.5 * last)
        .map(|r| r.episode)
}

/// A greedy policy keyed by canonical product-state encoding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyArtifact {
    pub model: String,
    pub automaton: String,
    pub mode: EmbeddingMode,
    pub repetition: usize,
    pub seed: u64,
    pub initial: String,
    pub policy: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeatCell {
    pub row: usize,
    pub col: usize,
    /// Label-weighted learned value over the cell's start states.
    pub learned: f64,
    pub oracle: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepetitionSummary {
    pub repetition: usize,
    pub seed: u64,
    pub episodes_run: usize,
    pub converged_at: Option<usize>,
    pub visited_states: usize,
    pub total_steps: usize,
    pub final_value_at_x0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub mdp_states: usize,
    pub automaton_states: usize,
    pub accepting_sets: usize,
    /// Reachable from every start state; `None` above the oracle cap.
    pub product_states: Option<usize>,
    pub repetitions: Vec<RepetitionSummary>,
    pub final_mean_reward: f64,
    pub final_mean_value_at_x0: f64,
    pub first_half_episode: Option<usize>,
    pub notices: Vec<String>,
}

pub struct ArtifactBundle {
    pub summary: Summary,
    pub curves: Vec<Vec<CurvePoint>>,
    pub aggregate: Vec<AggregateRow>,
    pub policy: PolicyArtifact,
    pub values: BTreeMap<String, f64>,
    pub heatmap: Option<Vec<HeatCell>>,
    pub oracle: Option<OracleReport>,
}

/// Trains every repetition; results are in repetition order.
pub fn train_repetitions(p: &Product<'_>, cfg: &ExperimentConfig) -> Vec<(u64, TrainResult)> {
    (0..cfg.repetitions)
        .into_par_iter()
        .map(|rep| {
            let seed = cfg.learn.seed.wrapping_add(rep as u64);
            let learn = ltlrl::learning::LearnConfig {
                seed,
                ..cfg.learn.clone()
            };
            (seed, train(p, &learn, &cfg.reward))
        })
        .collect()
}

fn heatmap(p: &Product<'_>, table: &QTable, analysis: Option<&Analysis>) -> Option<Vec<HeatCell>> {
    let m = p.mdp();
    let mut cells = Vec::with_capacity(m.num_states());
    for s in 0..m.num_states() {
        let (row, col) = cell_of_state_name(m.state_name(s))?;
        let mut learned = 0.0;
        let mut oracle = 0.0;
        for &(l, pl) in m.labels(s) {
            let x = p.start_state(s, l);
            learned += pl * table.value(&x);
            if let Some(a) = analysis {
                oracle += pl * a.sat.values[a.ep.index[&x]];
            }
        }
        cells.push(HeatCell {
            row,
            col,
            learned,
            oracle: analysis.map(|_| oracle),
        });
    }
    Some(cells)
}

fn policy_over<'s>(
    p: &Product<'_>,
    table: &QTable,
    states: impl Iterator<Item = &'s ProductState>,
) -> (BTreeMap<String, String>, BTreeMap<String, f64>) {
    let mut policy = BTreeMap::new();
    let mut values = BTreeMap::new();
    for x in states {
        let key = p.encode(x);
        policy.insert(key.clone(), p.action_name(x, greedy_action(p, table, x)));
        values.insert(key, table.value(x));
    }
    (policy, values)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ArtifactBundle> {
    cfg.validate()?;
    let setup = Setup::load(&cfg.model, &cfg.automaton, cfg.mode)?;
    let p = setup.product();
    let runs = train_repetitions(&p, cfg);
    let mut notices = Vec::new();
    let analysis = analyse(&p, cfg.oracle_cap)?;
    if analysis.is_none() {
        notices.push(format!(
            "oracle skipped: product exceeds {} states",
            cfg.oracle_cap
        ));
    }
    let oracle = match &analysis {
        Some(a) => {
            let learned: Vec<(usize, u64, &QTable)> = runs
                .iter()
                .enumerate()
                .map(|(i, (seed, r))| (i, *seed, &r.table))
                .collect();
            Some(oracle_report(a, &p, cfg.oracle_cap, &learned)?)
        }
        None => None,
    };

    let (seed0, first) = &runs[0];
    let (policy, values) = match &analysis {
        Some(a) => policy_over(&p, &first.table, a.ep.states.iter()),
        None => policy_over(&p, &first.table, first.table.rows.keys()),
    };
    let policy = PolicyArtifact {
        model: cfg.model.clone(),
        automaton: cfg.automaton.clone(),
        mode: cfg.mode,
        repetition: 0,
        seed: *seed0,
        initial: p.encode(&p.initial_state()),
        policy,
    };

    let curves: Vec<Vec<CurvePoint>> = runs.iter().map(|(_, r)| r.curve.clone()).collect();
    let agg = aggregate(&curves);
    let last = agg.last().expect("episodes >= 1");
    let summary = Summary {
        config: cfg.clone(),
        mdp_states: setup.mdp.num_states(),
        automaton_states: setup.automaton.num_states(),
        accepting_sets: setup.automaton.num_sets(),
        product_states: analysis.as_ref().map(|a| a.ep.len()),
        repetitions: runs
            .iter()
            .enumerate()
            .map(|(i, (seed, r))| RepetitionSummary {
                repetition: i,
                seed: *seed,
                episodes_run: r.episodes_run,
                converged_at: r.converged_at,
                visited_states: r.table.len(),
                total_steps: r.curve.iter().map(|c| c.steps).sum(),
                final_value_at_x0: r.curve.last().map_or(0.0, |c| c.value_at_x0),
            })
            .collect(),
        final_mean_reward: last.mean_reward,
        final_mean_value_at_x0: last.mean_value_at_x0,
        first_half_episode: first_half_episode(&agg),
        notices,
    };
    let bundle = ArtifactBundle {
        heatmap: heatmap(&p, &first.table, analysis.as_ref()),
        summary,
        curves,
        aggregate: agg,
        policy,
        values,
        oracle,
    };
    if let Some(dir) = &cfg.out {
        bundle.write(dir)?;
    }
    Ok(bundle)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn write_csv<T: Serialize>(path: &Path, header: Option<&str>, rows: &[T]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    if let Some(h) = header {
        writeln!(file, "# {h}").map_err(io_err(path))?;
    }
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))
}

pub fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

impl ArtifactBundle {
    /// Writes the bundle under `dir` and returns the files written, in order.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let mut files = Vec::new();
        let curves_dir = dir.join("curves");
        create_dir(&curves_dir)?;
        for (i, c) in self.curves.iter().enumerate() {
            let path = curves_dir.join(format!("rep_{i:03}.csv"));
            write_csv(&path, None, c)?;
            files.push(path);
        }
        let n = self.curves.len();
        let path = dir.join("aggregate.csv");
        write_csv(
            &path,
            Some(&format!(
                "mean and population standard deviation (divisor n) over {n} repetitions"
            )),
            &self.aggregate,
        )?;
        files.push(path);
        let path = dir.join("policy.json");
        write_json(&path, &self.policy)?;
        files.push(path);
        let path = dir.join("values.json");
        write_json(&path, &self.values)?;
        files.push(path);
        if let Some(h) = &self.heatmap {
            let path = dir.join("heatmap.csv");
            write_csv(&path, None, h)?;
            files.push(path);
        }
        if let Some(o) = &self.oracle {
            let path = dir.join("oracle.json");
            write_json(&path, o)?;
            files.push(path);
        }
        let path = dir.join("summary.json");
        write_json(&path, &self.summary)?;
        files.push(path);
        Ok(files)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(episode: usize, r: f64) -> CurvePoint {
        CurvePoint {
            episode,
            cumulative_reward: r,
            steps: 10,
            value_at_x0: r / 2.0,
        }
    }

    #[test]
    fn population_statistics() {
        let curves = vec![vec![point(1, 1.0), point(2, 0.0)], vec![point(1, 3.0)]];
        let agg = aggregate(&curves);
        assert_eq!(agg.len(), 2);
        assert_eq!(
            (agg[0].n, agg[0].mean_reward, agg[0].std_reward),
            (2, 2.0, 1.0)
        );
        assert_eq!((agg[1].n, agg[1].std_reward), (1, 0.0));
        assert_eq!(first_half_episode(&agg), None);
    }

    #[test]
    fn half_of_final() {
        let curves = vec![(1..=5).map(|e| point(e, e as f64)).collect()];
        assert_eq!(first_half_episode(&aggregate(&curves)), Some(3));
    }
}
