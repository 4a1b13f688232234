//! Tracking-frontier embedding of an LDGBA.
//!
//! The frontier `T` is a [`SetMask`] over accepting-set indices holding the
//! sets not yet visited in the current round.

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::automata::{AutState, Lasso, Ldgba, SetMask};
use crate::error::{Error, Result};
use crate::props::Letter;

/// How the frontier is reset once a round completes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResetMode {
    /// Emptying `T` resets it at once to `F` minus the sets that closed the
    /// round, or to `F` when those were all of `F`. `T` is never empty.
    #[default]
    Immediate,
    /// `T` may become empty; an empty `T` counts as `F` for acceptance and is
    /// refilled on the next accepting visit.
    Deferred,
    /// `T` stays `F`: the plain product without frontier tracking.
    Frozen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EmbeddedState {
    pub q: AutState,
    pub frontier: SetMask,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Input {
    Letter(Letter),
    Epsilon,
}

/// `f_V` on raw masks. `member` lists the sets containing the visited state.
pub fn frontier_mask_update(
    member: SetMask,
    full: SetMask,
    t: SetMask,
    mode: ResetMode,
) -> SetMask {
    match mode {
        ResetMode::Frozen => full,
        ResetMode::Immediate => {
            if member == 0 || (t != 0 && member & t == 0) {
                return t;
            }
            let rest = t & !member;
            if rest != 0 {
                return rest;
            }
            // Sets in `member` but not `t` were credited earlier this round.
            match full & !t {
                0 => full,
                r => r,
            }
        }
        ResetMode::Deferred => {
            if t == 0 {
                if member == 0 {
                    0
                } else {
                    full & !member
                }
            } else if member & t != 0 {
                t & !member
            } else {
                t
            }
        }
    }
}

/// The frontier as seen by the acceptance check.
pub fn effective_frontier(full: SetMask, t: SetMask, mode: ResetMode) -> SetMask {
    match mode {
        ResetMode::Frozen => full,
        ResetMode::Deferred if t == 0 => full,
        _ => t,
    }
}

/// `f_V(q, T)` with the default reset.
pub fn frontier_update(a: &Ldgba, q: AutState, t: SetMask) -> SetMask {
    frontier_mask_update(a.membership(q), a.full_mask(), t, ResetMode::Immediate)
}

/// Accepting-set indices `j` (as a mask) with `q ∈ F_j` and `j ∈ T`.
pub fn accepting_flags(a: &Ldgba, x: EmbeddedState, mode: ResetMode) -> SetMask {
    a.membership(x.q) & effective_frontier(a.full_mask(), x.frontier, mode)
}

/// Membership of `x` in `F̄_j`; `j` is one-based.
pub fn is_accepting_embedded(a: &Ldgba, x: EmbeddedState, j: usize) -> Result<bool> {
    if j == 0 || j > a.num_sets() {
        return Err(Error::AcceptingIndex {
            index: j,
            count: a.num_sets(),
        });
    }
    Ok(accepting_flags(a, x, ResetMode::Immediate) & (1 << (j - 1)) != 0)
}

/// One embedded transition per base successor `q'`. Flags are taken from
/// `(q', T)` before the update; the returned state carries `f_V(q', T)`.
pub fn eldgba_step(
    a: &Ldgba,
    x: EmbeddedState,
    input: Input,
    mode: ResetMode,
) -> Vec<(EmbeddedState, SetMask)> {
    let succ = match input {
        Input::Letter(l) => a.successors(x.q, l),
        Input::Epsilon => a.epsilon_successors(x.q),
    };
    succ.iter()
        .map(|&q| {
            let pre = EmbeddedState {
                q,
                frontier: x.frontier,
            };
            let flags = accepting_flags(a, pre, mode);
            let t = frontier_mask_update(a.membership(q), a.full_mask(), x.frontier, mode);
            (EmbeddedState { q, frontier: t }, flags)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddedRun {
    /// `run[0] = (q0, F)`; entry `i > 0` is the state reached by letter
    /// `i - 1` paired with the frontier before its update.
    pub states: Vec<EmbeddedState>,
    /// `flags[i]` is the accepting check of `states[i]`; `flags[0] = 0`.
    pub flags: Vec<SetMask>,
    /// Set when the run stopped early on an undefined transition.
    pub truncated: Option<String>,
}

/// Runs the embedding over the first `len` letters of `word`. Where the base
/// automaton branches, the first successor is taken.
pub fn generate_run(a: &Ldgba, word: &[Letter], len: usize, mode: ResetMode) -> EmbeddedRun {
    let full = a.full_mask();
    let mut t = full;
    let mut q = a.initial();
    let mut run = EmbeddedRun {
        states: vec![EmbeddedState { q, frontier: t }],
        flags: vec![0],
        truncated: None,
    };
    for (i, &l) in word.iter().take(len).enumerate() {
        let Some(&next) = a.successors(q, l).first() else {
            run.truncated = Some(format!(
                "no transition from `{}` on {} at position {i}",
                a.state_name(q),
                a.props().display(l)
            ));
            break;
        };
        let cur = EmbeddedState {
            q: next,
            frontier: t,
        };
        run.flags.push(accepting_flags(a, cur, mode));
        t = frontier_mask_update(a.membership(next), full, t, mode);
        run.states.push(cur);
        q = next;
    }
    run
}

/// Acceptance of a lasso by the embedded automaton: some reachable cycle of
/// `(q, T, position)` nodes consumes letters and raises every flag.
pub fn embedded_lasso_accepted(a: &Ldgba, w: &Lasso, mode: ResetMode) -> Result<bool> {
    w.check_letters(a.props().alphabet_size())?;
    let full = a.full_mask();
    let mut g: DiGraph<(), (bool, SetMask)> = DiGraph::new();
    let mut index: HashMap<(AutState, SetMask, usize), NodeIndex> = HashMap::new();
    let start = (a.initial(), full, 0);
    index.insert(start, g.add_node(()));
    let mut queue = vec![start];
    while let Some(key @ (q, t, pos)) = queue.pop() {
        let from = index[&key];
        let x = EmbeddedState { q, frontier: t };
        let mut moves = Vec::new();
        for (y, flags) in eldgba_step(a, x, Input::Letter(w.at(pos)), mode) {
            moves.push(((y.q, y.frontier, w.next_position(pos)), true, flags));
        }
        for (y, flags) in eldgba_step(a, x, Input::Epsilon, mode) {
            moves.push(((y.q, y.frontier, pos), false, flags));
        }
        for (next, consumes, flags) in moves {
            let to = *index.entry(next).or_insert_with(|| {
                queue.push(next);
                g.add_node(())
            });
            g.add_edge(from, to, (consumes, flags));
        }
    }
    let mut comp = vec![0usize; g.node_count()];
    for (c, scc) in tarjan_scc(&g).iter().enumerate() {
        for n in scc {
            comp[n.index()] = c;
        }
    }
    let mut consumes: HashMap<usize, bool> = HashMap::new();
    let mut seen: HashMap<usize, SetMask> = HashMap::new();
    for e in g.edge_indices() {
        let (x, y) = g.edge_endpoints(e).unwrap();
        if comp[x.index()] != comp[y.index()] {
            continue;
        }
        let (c, flags) = g[e];
        *consumes.entry(comp[x.index()]).or_default() |= c;
        *seen.entry(comp[x.index()]).or_default() |= flags;
    }
    Ok(seen
        .iter()
        .any(|(c, &m)| m & full == full && consumes.get(c).copied().unwrap_or(false)))
}
