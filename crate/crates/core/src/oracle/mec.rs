//! Maximal end components by iterated SCC refinement.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::automata::SetMask;
use crate::product::ExplicitProduct;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EndComponent {
    /// Ascending state indices.
    pub states: Vec<usize>,
    /// `actions[i]` are the positions (into `ExplicitProduct::actions`) kept
    /// at `states[i]`.
    pub actions: Vec<Vec<usize>>,
}

impl EndComponent {
    pub fn accepting_mask(&self, ep: &ExplicitProduct) -> SetMask {
        self.states.iter().fold(0, |m, &x| m | ep.accepting[x])
    }

    pub fn contains(&self, x: usize) -> bool {
        self.states.binary_search(&x).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MecKind {
    /// Intersects every accepting set.
    Accepting,
    /// Intersects some but not all.
    Neutral,
    /// Intersects none.
    Rejecting,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifiedMec {
    pub kind: MecKind,
    pub mask: SetMask,
    pub component: EndComponent,
}

/// The maximal end components, ordered by smallest state.
pub fn mec_decomposition(ep: &ExplicitProduct) -> Vec<EndComponent> {
    let n = ep.len();
    let mut alive = vec![true; n];
    let mut allowed: Vec<Vec<bool>> = ep.actions.iter().map(|a| vec![true; a.len()]).collect();
    let mut comp = vec![usize::MAX; n];
    loop {
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
        for _ in 0..n {
            g.add_node(());
        }
        for x in 0..n {
            if !alive[x] {
                continue;
            }
            for (k, row) in ep.transitions[x].iter().enumerate() {
                if allowed[x][k] {
                    for &(y, _) in row {
                        if alive[y] {
                            g.add_edge(NodeIndex::new(x), NodeIndex::new(y), ());
                        }
                    }
                }
            }
        }
        for (c, scc) in tarjan_scc(&g).iter().enumerate() {
            for v in scc {
                comp[v.index()] = c;
            }
        }
        let mut changed = false;
        for x in 0..n {
            if !alive[x] {
                continue;
            }
            for (k, row) in ep.transitions[x].iter().enumerate() {
                if allowed[x][k] && row.iter().any(|&(y, _)| !alive[y] || comp[y] != comp[x]) {
                    allowed[x][k] = false;
                    changed = true;
                }
            }
            if !allowed[x].iter().any(|&a| a) {
                alive[x] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> =
        std::collections::BTreeMap::new();
    for x in (0..n).filter(|&x| alive[x]) {
        groups.entry(comp[x]).or_default().push(x);
    }
    let mut out: Vec<EndComponent> = groups
        .into_values()
        .map(|states| {
            let actions = states
                .iter()
                .map(|&x| (0..allowed[x].len()).filter(|&k| allowed[x][k]).collect())
                .collect();
            EndComponent { states, actions }
        })
        .collect();
    out.sort_by_key(|c| c.states[0]);
    out
}

pub fn classify_mecs(ep: &ExplicitProduct, mecs: &[EndComponent]) -> Vec<ClassifiedMec> {
    let full = ep.full_mask();
    mecs.iter()
        .map(|c| {
            let mask = c.accepting_mask(ep);
            let kind = if mask & full == full {
                MecKind::Accepting
            } else if mask == 0 {
                MecKind::Rejecting
            } else {
                MecKind::Neutral
            };
            ClassifiedMec {
                kind,
                mask,
                component: c.clone(),
            }
        })
        .collect()
}

/// The accepting maximal end components.
pub fn amec_set(ep: &ExplicitProduct) -> Vec<EndComponent> {
    classify_mecs(ep, &mec_decomposition(ep))
        .into_iter()
        .filter(|m| m.kind == MecKind::Accepting)
        .map(|m| m.component)
        .collect()
}

/// Membership vector of the union of the AMEC state sets.
pub fn amec_states(ep: &ExplicitProduct, amecs: &[EndComponent]) -> Vec<bool> {
    let mut out = vec![false; ep.len()];
    for c in amecs {
        for &x in &c.states {
            out[x] = true;
        }
    }
    out
}
