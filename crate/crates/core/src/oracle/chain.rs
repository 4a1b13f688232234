//! Markov chains induced by stationary deterministic policies.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use super::reach::{VI_MAX_SWEEPS, VI_TOLERANCE};
use crate::automata::SetMask;
use crate::error::{Error, Result};
use crate::product::ExplicitProduct;

/// Action position per explicit state; `None` where the policy is silent.
pub type PolicyVec = [Option<usize>];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InducedChain {
    /// States reachable from the start, ascending.
    pub reachable: Vec<usize>,
    pub transient: Vec<usize>,
    /// Bottom strongly connected components, each ascending, ordered by
    /// smallest state.
    pub recurrent: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    All,
    None,
    Partial,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrentClass {
    pub states: Vec<usize>,
    pub mask: SetMask,
    pub verdict: Verdict,
}

fn row<'a>(ep: &'a ExplicitProduct, policy: &PolicyVec, x: usize) -> Result<&'a [(usize, f64)]> {
    match policy.get(x).copied().flatten() {
        Some(k) if k < ep.transitions[x].len() => Ok(&ep.transitions[x][k]),
        _ => Err(Error::PolicyGap(format!("#{x}"))),
    }
}

pub fn induced_chain(
    ep: &ExplicitProduct,
    policy: &PolicyVec,
    start: usize,
) -> Result<InducedChain> {
    let n = ep.len();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
    for _ in 0..n {
        g.add_node(());
    }
    while let Some(x) = stack.pop() {
        for &(y, p) in row(ep, policy, x)? {
            if p <= 0.0 {
                continue;
            }
            g.add_edge(NodeIndex::new(x), NodeIndex::new(y), ());
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    let reachable: Vec<usize> = (0..n).filter(|&x| seen[x]).collect();
    let mut comp = vec![usize::MAX; n];
    let sccs = tarjan_scc(&g);
    for (c, scc) in sccs.iter().enumerate() {
        for v in scc {
            comp[v.index()] = c;
        }
    }
    let mut recurrent = Vec::new();
    let mut in_bottom = vec![false; n];
    for scc in &sccs {
        let x0 = scc[0].index();
        if !seen[x0] {
            continue;
        }
        let closed = scc
            .iter()
            .all(|v| g.neighbors(*v).all(|w| comp[w.index()] == comp[x0]));
        if closed {
            let mut states: Vec<usize> = scc.iter().map(|v| v.index()).collect();
            states.sort_unstable();
            for &x in &states {
                in_bottom[x] = true;
            }
            recurrent.push(states);
        }
    }
    recurrent.sort_by_key(|c| c[0]);
    let transient = reachable
        .iter()
        .copied()
        .filter(|&x| !in_bottom[x])
        .collect();
    Ok(InducedChain {
        reachable,
        transient,
        recurrent,
    })
}

/// Accepting sets met by each recurrent class, with an all-or-none verdict.
pub fn classify_recurrent_classes(
    ep: &ExplicitProduct,
    policy: &PolicyVec,
    start: usize,
) -> Result<Vec<RecurrentClass>> {
    let chain = induced_chain(ep, policy, start)?;
    let full = ep.full_mask();
    Ok(chain
        .recurrent
        .into_iter()
        .map(|states| {
            let mask = states.iter().fold(0, |m, &x| m | ep.accepting[x]);
            let verdict = if mask & full == full {
                Verdict::All
            } else if mask == 0 {
                Verdict::None
            } else {
                Verdict::Partial
            };
            RecurrentClass {
                states,
                mask,
                verdict,
            }
        })
        .collect())
}

/// Probability from `start` of ending in a recurrent class that meets every
/// accepting set.
pub fn policy_satisfaction_probability(
    ep: &ExplicitProduct,
    policy: &PolicyVec,
    start: usize,
) -> Result<f64> {
    let classes = classify_recurrent_classes(ep, policy, start)?;
    let n = ep.len();
    let mut v = vec![0.0; n];
    let mut fixed = vec![false; n];
    for c in &classes {
        let value = if c.verdict == Verdict::All { 1.0 } else { 0.0 };
        for &x in &c.states {
            v[x] = value;
            fixed[x] = true;
        }
    }
    let chain = induced_chain(ep, policy, start)?;
    let transient: Vec<usize> = chain.transient;
    if fixed[start] {
        return Ok(v[start]);
    }
    for _ in 0..VI_MAX_SWEEPS {
        let mut delta: f64 = 0.0;
        for &x in transient.iter().rev() {
            let new: f64 = row(ep, policy, x)?.iter().map(|&(y, p)| p * v[y]).sum();
            delta = delta.max((new - v[x]).abs());
            v[x] = new;
        }
        if delta < VI_TOLERANCE * 1e-2 {
            break;
        }
    }
    Ok(v[start])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForceReport {
    pub policies: usize,
    pub satisfying: usize,
    pub best_probability: f64,
    /// First policy in enumeration order attaining `best_probability`.
    pub best_policy: Vec<usize>,
}

impl BruteForceReport {
    pub fn exists(&self) -> bool {
        self.satisfying > 0
    }
}

/// Enumerates every deterministic memoryless policy of `ep` and evaluates
/// its satisfaction probability from the initial state.
pub fn brute_force_deterministic_policies(
    ep: &ExplicitProduct,
    limit: usize,
) -> Result<BruteForceReport> {
    let radices: Vec<usize> = ep.actions.iter().map(Vec::len).collect();
    let count: f64 = radices.iter().map(|&r| r as f64).product();
    if count > limit as f64 {
        return Err(Error::PolicyBudgetExceeded { count, limit });
    }
    let mut digits = vec![0usize; radices.len()];
    let mut report = BruteForceReport {
        policies: 0,
        satisfying: 0,
        best_probability: -1.0,
        best_policy: Vec::new(),
    };
    loop {
        let policy: Vec<Option<usize>> = digits.iter().map(|&d| Some(d)).collect();
        let p = policy_satisfaction_probability(ep, &policy, ep.initial())?;
        report.policies += 1;
        if p > 0.0 {
            report.satisfying += 1;
        }
        if p > report.best_probability {
            report.best_probability = p;
            report.best_policy = digits.clone();
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(report);
            }
            digits[i] += 1;
            if digits[i] < radices[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}
