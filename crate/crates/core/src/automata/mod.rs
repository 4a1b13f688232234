//! Limit-deterministic generalized Büchi automata.

mod builtin;
mod degen;
mod io;
mod lasso;

use std::fmt;

use crate::error::{Error, Result};
use crate::props::{Letter, PropSet};

pub use builtin::{builtin_automaton, BUILTIN_NAMES};
pub use degen::degeneralize;
pub use io::{
    load_automaton, store_automaton, AutomatonDocument, EpsilonDoc, LettersDoc, TransitionDoc,
};
pub use lasso::{lasso_accepted, Lasso};

pub type AutState = usize;

/// A set of accepting-set indices, bit `j` standing for `F_{j+1}`.
pub type SetMask = u64;

/// Upper bound on the number of accepting sets.
pub const MAX_ACCEPTING_SETS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Ldgba {
    props: PropSet,
    states: Vec<String>,
    initial: AutState,
    deterministic: Vec<bool>,
    /// `delta[q][letter]`, successors in document order.
    delta: Vec<Vec<Vec<AutState>>>,
    epsilon: Vec<Vec<AutState>>,
    accepting: Vec<Vec<AutState>>,
    membership: Vec<SetMask>,
}

/// Unvalidated construction of an [`Ldgba`].
pub struct LdgbaBuilder {
    aut: Ldgba,
}

impl LdgbaBuilder {
    /// All states start in `Q_D`.
    pub fn new(props: PropSet, states: Vec<String>) -> Self {
        let n = states.len();
        let k = props.alphabet_size();
        LdgbaBuilder {
            aut: Ldgba {
                props,
                states,
                initial: 0,
                deterministic: vec![true; n],
                delta: vec![vec![Vec::new(); k]; n],
                epsilon: vec![Vec::new(); n],
                accepting: Vec::new(),
                membership: vec![0; n],
            },
        }
    }

    pub fn initial(&mut self, q: AutState) -> &mut Self {
        self.aut.initial = q;
        self
    }

    pub fn nondeterministic(&mut self, q: AutState) -> &mut Self {
        self.aut.deterministic[q] = false;
        self
    }

    pub fn edge(&mut self, from: AutState, letter: Letter, to: AutState) -> &mut Self {
        let row = &mut self.aut.delta[from][letter.index()];
        if !row.contains(&to) {
            row.push(to);
        }
        self
    }

    /// Adds `from -> to` on every letter accepted by `guard`.
    pub fn edges_where(
        &mut self,
        from: AutState,
        to: AutState,
        guard: impl Fn(Letter) -> bool,
    ) -> &mut Self {
        let letters: Vec<Letter> = self.aut.props.letters().filter(|&l| guard(l)).collect();
        for l in letters {
            self.edge(from, l, to);
        }
        self
    }

    pub fn epsilon(&mut self, from: AutState, to: AutState) -> &mut Self {
        if !self.aut.epsilon[from].contains(&to) {
            self.aut.epsilon[from].push(to);
        }
        self
    }

    pub fn accepting_set(&mut self, mut states: Vec<AutState>) -> &mut Self {
        states.sort_unstable();
        states.dedup();
        self.aut.accepting.push(states);
        self
    }

    pub fn build(mut self) -> Ldgba {
        let a = &mut self.aut;
        a.membership = vec![0; a.states.len()];
        for (j, set) in a.accepting.iter().enumerate().take(MAX_ACCEPTING_SETS) {
            for &q in set {
                if q < a.membership.len() {
                    a.membership[q] |= 1 << j;
                }
            }
        }
        self.aut
    }
}

impl Ldgba {
    pub fn props(&self) -> &PropSet {
        &self.props
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, q: AutState) -> &str {
        &self.states[q]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<AutState> {
        self.states.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> AutState {
        self.initial
    }

    pub fn is_deterministic(&self, q: AutState) -> bool {
        self.deterministic[q]
    }

    pub fn successors(&self, q: AutState, letter: Letter) -> &[AutState] {
        &self.delta[q][letter.index()]
    }

    pub fn epsilon_successors(&self, q: AutState) -> &[AutState] {
        &self.epsilon[q]
    }

    /// Number of accepting sets `f`.
    pub fn num_sets(&self) -> usize {
        self.accepting.len()
    }

    pub fn accepting_sets(&self) -> &[Vec<AutState>] {
        &self.accepting
    }

    /// Indices of the accepting sets containing `q`.
    pub fn membership(&self, q: AutState) -> SetMask {
        self.membership[q]
    }

    /// The mask `{1..f}`.
    pub fn full_mask(&self) -> SetMask {
        full_mask(self.num_sets())
    }
}

pub(crate) fn full_mask(f: usize) -> SetMask {
    if f >= 64 {
        SetMask::MAX
    } else {
        (1 << f) - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LdgbaViolation {
    /// `q ∈ Q_D` has no successor on `letter`.
    NotTotal {
        state: String,
        letter: String,
    },
    /// `q ∈ Q_D` has several successors on `letter`.
    NotDeterministic {
        state: String,
        letter: String,
    },
    /// `q ∈ Q_D` moves to a `Q_N` state.
    LeavesDeterministic {
        state: String,
        letter: String,
        target: String,
    },
    EpsilonFromDeterministic {
        state: String,
        target: String,
    },
    EpsilonIntoNondeterministic {
        state: String,
        target: String,
    },
    AcceptingOutsideDeterministic {
        set: usize,
        state: String,
    },
    NoAcceptingSets,
    TooManyAcceptingSets(usize),
    UnknownState {
        location: String,
        index: usize,
    },
}

impl fmt::Display for LdgbaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use LdgbaViolation::*;
        match self {
            NotTotal { state, letter } => write!(
                f,
                "not total: `{state}` in Q_D has no successor on {letter}"
            ),
            NotDeterministic { state, letter } => {
                write!(
                    f,
                    "not deterministic: `{state}` in Q_D has several successors on {letter}"
                )
            }
            LeavesDeterministic {
                state,
                letter,
                target,
            } => {
                write!(
                    f,
                    "Q_D not closed: `{state}` moves on {letter} to `{target}` in Q_N"
                )
            }
            EpsilonFromDeterministic { state, target } => {
                write!(f, "epsilon edge `{state}` -> `{target}` leaves Q_D")
            }
            EpsilonIntoNondeterministic { state, target } => {
                write!(f, "epsilon edge `{state}` -> `{target}` does not enter Q_D")
            }
            AcceptingOutsideDeterministic { set, state } => {
                write!(f, "accepting set F_{set} contains `{state}` from Q_N")
            }
            NoAcceptingSets => write!(f, "no accepting sets"),
            TooManyAcceptingSets(n) => write!(
                f,
                "{n} accepting sets exceed the limit of {MAX_ACCEPTING_SETS}"
            ),
            UnknownState { location, index } => {
                write!(f, "{location} refers to unknown state #{index}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LdgbaReport {
    pub violations: Vec<LdgbaViolation>,
}

impl LdgbaReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            return Ok(());
        }
        let text: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        Err(Error::InvalidAutomaton(text.join("; ")))
    }
}

pub fn validate_ldgba(a: &Ldgba) -> LdgbaReport {
    use LdgbaViolation::*;
    let mut v = Vec::new();
    let n = a.num_states();
    let name = |q: usize| a.states.get(q).cloned().unwrap_or_else(|| format!("#{q}"));
    if a.initial >= n {
        v.push(UnknownState {
            location: "initial".into(),
            index: a.initial,
        });
    }
    if a.accepting.is_empty() {
        v.push(NoAcceptingSets);
    }
    if a.accepting.len() > MAX_ACCEPTING_SETS {
        v.push(TooManyAcceptingSets(a.accepting.len()));
    }
    for q in 0..n {
        for l in a.props.letters() {
            for &t in a.successors(q, l) {
                if t >= n {
                    v.push(UnknownState {
                        location: format!("delta({}, {})", name(q), a.props.display(l)),
                        index: t,
                    });
                }
            }
        }
        for &t in &a.epsilon[q] {
            if t >= n {
                v.push(UnknownState {
                    location: format!("epsilon({})", name(q)),
                    index: t,
                });
            }
        }
    }
    if !v.is_empty() {
        return LdgbaReport { violations: v };
    }
    for q in 0..n {
        if a.deterministic[q] {
            for l in a.props.letters() {
                let letter = a.props.display(l).to_string();
                let succ = a.successors(q, l);
                match succ.len() {
                    0 => v.push(NotTotal {
                        state: name(q),
                        letter: letter.clone(),
                    }),
                    1 => {}
                    _ => v.push(NotDeterministic {
                        state: name(q),
                        letter: letter.clone(),
                    }),
                }
                for &t in succ {
                    if !a.deterministic[t] {
                        v.push(LeavesDeterministic {
                            state: name(q),
                            letter: letter.clone(),
                            target: name(t),
                        });
                    }
                }
            }
            for &t in &a.epsilon[q] {
                v.push(EpsilonFromDeterministic {
                    state: name(q),
                    target: name(t),
                });
            }
        } else {
            for &t in &a.epsilon[q] {
                if !a.deterministic[t] {
                    v.push(EpsilonIntoNondeterministic {
                        state: name(q),
                        target: name(t),
                    });
                }
            }
        }
    }
    for (j, set) in a.accepting.iter().enumerate() {
        for &q in set {
            if q >= n {
                v.push(UnknownState {
                    location: format!("F_{}", j + 1),
                    index: q,
                });
            } else if !a.deterministic[q] {
                v.push(AcceptingOutsideDeterministic {
                    set: j + 1,
                    state: name(q),
                });
            }
        }
    }
    LdgbaReport { violations: v }
}
