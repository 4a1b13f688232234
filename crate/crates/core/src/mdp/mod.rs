//! Probabilistic labeled MDPs.
//!
//! A [`PlMdp`] couples motion uncertainty (the transition kernel `p_S`) with
//! environment uncertainty (the label distribution `p_L`). The agent never
//! sees either distribution; [`PlMdp::sample_step`] is the only interface a
//! model-free learner uses.

mod grid;
mod io;

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::props::{Letter, PropSet};

pub use grid::{
    build_grid_env, cell_name, cell_of_state_name, CellLabel, Direction, GridSpec, GRID_ACTIONS,
};
pub use io::{load_plmdp, store_plmdp, PlMdpDocument};

pub type StateId = usize;
pub type ActionId = usize;

/// Tolerance used for every stochasticity check on models.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct PlMdp {
    states: Vec<String>,
    actions: Vec<String>,
    props: PropSet,
    /// `available[s]` lists `A(s)` in ascending action order.
    available: Vec<Vec<ActionId>>,
    /// `transitions[s][a]`; empty when `a ∉ A(s)`.
    transitions: Vec<Vec<Vec<(StateId, f64)>>>,
    labels: Vec<Vec<(Letter, f64)>>,
    initial: StateId,
    initial_label: Letter,
}

/// Incremental construction of a [`PlMdp`]. Nothing is validated here;
/// run [`validate_plmdp`] on the result.
pub struct PlMdpBuilder {
    mdp: PlMdp,
}

impl PlMdpBuilder {
    pub fn new(states: Vec<String>, actions: Vec<String>, props: PropSet) -> Self {
        let n = states.len();
        let k = actions.len();
        PlMdpBuilder {
            mdp: PlMdp {
                states,
                actions,
                props,
                available: vec![Vec::new(); n],
                transitions: vec![vec![Vec::new(); k]; n],
                labels: vec![Vec::new(); n],
                initial: 0,
                initial_label: Letter::EMPTY,
            },
        }
    }

    /// Adds probability mass `p` to `(s, a, to)`, merging repeated entries.
    pub fn transition(&mut self, s: StateId, a: ActionId, to: StateId, p: f64) -> &mut Self {
        let row = &mut self.mdp.transitions[s][a];
        match row.iter_mut().find(|(t, _)| *t == to) {
            Some((_, q)) => *q += p,
            None => row.push((to, p)),
        }
        if let Err(pos) = self.mdp.available[s].binary_search(&a) {
            self.mdp.available[s].insert(pos, a);
        }
        self
    }

    pub fn label(&mut self, s: StateId, label: Letter, p: f64) -> &mut Self {
        let row = &mut self.mdp.labels[s];
        match row.iter_mut().find(|(l, _)| *l == label) {
            Some((_, q)) => *q += p,
            None => row.push((label, p)),
        }
        self
    }

    pub fn initial(&mut self, s: StateId, label: Letter) -> &mut Self {
        self.mdp.initial = s;
        self.mdp.initial_label = label;
        self
    }

    pub fn build(mut self) -> PlMdp {
        for row in self.mdp.transitions.iter_mut().flatten() {
            row.sort_by_key(|&(t, _)| t);
        }
        self.mdp
    }
}

impl PlMdp {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name)
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a]
    }

    pub fn action_names(&self) -> &[String] {
        &self.actions
    }

    pub fn action_index(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|n| n == name)
    }

    pub fn props(&self) -> &PropSet {
        &self.props
    }

    pub fn available(&self, s: StateId) -> &[ActionId] {
        &self.available[s]
    }

    pub fn is_available(&self, s: StateId, a: ActionId) -> bool {
        self.available[s].binary_search(&a).is_ok()
    }

    pub fn successors(&self, s: StateId, a: ActionId) -> &[(StateId, f64)] {
        &self.transitions[s][a]
    }

    pub fn labels(&self, s: StateId) -> &[(Letter, f64)] {
        &self.labels[s]
    }

    pub fn label_probability(&self, s: StateId, l: Letter) -> f64 {
        self.labels[s]
            .iter()
            .filter(|(x, _)| *x == l)
            .map(|(_, p)| p)
            .sum()
    }

    pub fn initial(&self) -> (StateId, Letter) {
        (self.initial, self.initial_label)
    }

    /// Draws `s' ~ p_S(s, a, ·)` and then `l' ~ p_L(s', ·)`.
    pub fn sample_step<R: Rng + ?Sized>(
        &self,
        s: StateId,
        a: ActionId,
        rng: &mut R,
    ) -> Result<(StateId, Letter)> {
        if !self.is_available(s, a) {
            return Err(Error::UnavailableAction {
                state: self.states[s].clone(),
                action: self
                    .actions
                    .get(a)
                    .cloned()
                    .unwrap_or_else(|| format!("#{a}")),
            });
        }
        let next = sample(&self.transitions[s][a], rng);
        let label = sample(&self.labels[next], rng);
        Ok((next, label))
    }

    pub fn sample_label<R: Rng + ?Sized>(&self, s: StateId, rng: &mut R) -> Letter {
        sample(&self.labels[s], rng)
    }
}

/// Inverse-CDF draw from a finite distribution. Falls back to the last
/// outcome when rounding leaves the cumulative sum a hair below one.
pub(crate) fn sample<T: Copy, R: Rng + ?Sized>(dist: &[(T, f64)], rng: &mut R) -> T {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(x, p) in dist {
        acc += p;
        if u < acc {
            return x;
        }
    }
    dist.last().expect("empty distribution").0
}

#[derive(Clone, Debug, PartialEq)]
pub enum MdpViolation {
    NoActions {
        state: String,
    },
    TransitionSum {
        state: String,
        action: String,
        sum: f64,
    },
    NegativeProbability {
        location: String,
        p: f64,
    },
    UnknownTarget {
        state: String,
        action: String,
        target: StateId,
    },
    LabelSum {
        state: String,
        sum: f64,
    },
    InitialLabel {
        state: String,
        label: String,
    },
    InitialState {
        index: StateId,
    },
}

impl fmt::Display for MdpViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MdpViolation::NoActions { state } => {
                write!(f, "state `{state}` has no available action")
            }
            MdpViolation::TransitionSum { state, action, sum } => {
                write!(f, "p_S(`{state}`, `{action}`, ·) sums to {sum}")
            }
            MdpViolation::NegativeProbability { location, p } => {
                write!(f, "probability {p} at {location} is outside [0, 1]")
            }
            MdpViolation::UnknownTarget {
                state,
                action,
                target,
            } => {
                write!(
                    f,
                    "transition (`{state}`, `{action}`) targets unknown state #{target}"
                )
            }
            MdpViolation::LabelSum { state, sum } => write!(f, "p_L(`{state}`, ·) sums to {sum}"),
            MdpViolation::InitialLabel { state, label } => {
                write!(f, "initial label {label} has zero probability in `{state}`")
            }
            MdpViolation::InitialState { index } => {
                write!(f, "initial state #{index} does not exist")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MdpReport {
    pub violations: Vec<MdpViolation>,
}

impl MdpReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            let text: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
            Err(Error::InvalidModel(text.join("; ")))
        }
    }
}

pub fn validate_plmdp(m: &PlMdp) -> MdpReport {
    let mut violations = Vec::new();
    let n = m.num_states();
    for s in 0..n {
        let name = &m.states[s];
        if m.available[s].is_empty() {
            violations.push(MdpViolation::NoActions {
                state: name.clone(),
            });
        }
        for &a in &m.available[s] {
            let row = &m.transitions[s][a];
            let mut sum = 0.0;
            for &(t, p) in row {
                if t >= n {
                    violations.push(MdpViolation::UnknownTarget {
                        state: name.clone(),
                        action: m.actions[a].clone(),
                        target: t,
                    });
                }
                if !(0.0..=1.0).contains(&p) {
                    violations.push(MdpViolation::NegativeProbability {
                        location: format!("p_S(`{name}`, `{}`, #{t})", m.actions[a]),
                        p,
                    });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
                violations.push(MdpViolation::TransitionSum {
                    state: name.clone(),
                    action: m.actions[a].clone(),
                    sum,
                });
            }
        }
        let mut sum = 0.0;
        for &(l, p) in &m.labels[s] {
            if !(0.0..=1.0).contains(&p) {
                violations.push(MdpViolation::NegativeProbability {
                    location: format!("p_L(`{name}`, {})", m.props.display(l)),
                    p,
                });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            violations.push(MdpViolation::LabelSum {
                state: name.clone(),
                sum,
            });
        }
    }
    if m.initial >= n {
        violations.push(MdpViolation::InitialState { index: m.initial });
    } else if m.label_probability(m.initial, m.initial_label) <= 0.0 {
        violations.push(MdpViolation::InitialLabel {
            state: m.states[m.initial].clone(),
            label: m.props.display(m.initial_label).to_string(),
        });
    }
    MdpReport { violations }
}
