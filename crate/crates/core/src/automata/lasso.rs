//! Ultimately periodic words and exact acceptance.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use super::{Ldgba, SetMask};
use crate::error::{Error, Result};
use crate::props::Letter;

/// The ω-word `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lasso {
    pub prefix: Vec<Letter>,
    pub cycle: Vec<Letter>,
}

impl Lasso {
    /// Panics on an empty cycle.
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Self {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        Lasso { prefix, cycle }
    }

    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Letter at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> Letter {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// Position reached after reading position `pos` of the folded word.
    pub fn next_position(&self, pos: usize) -> usize {
        if pos + 1 < self.len() {
            pos + 1
        } else {
            self.prefix.len()
        }
    }

    pub fn rotated(&self, k: usize) -> Lasso {
        let k = k % self.cycle.len();
        let mut prefix = self.prefix.clone();
        prefix.extend_from_slice(&self.cycle[..k]);
        let mut cycle = self.cycle[k..].to_vec();
        cycle.extend_from_slice(&self.cycle[..k]);
        Lasso { prefix, cycle }
    }

    pub fn unrolled(&self, k: usize) -> Lasso {
        let cycle = self
            .cycle
            .iter()
            .copied()
            .cycle()
            .take(self.cycle.len() * k.max(1))
            .collect();
        Lasso {
            prefix: self.prefix.clone(),
            cycle,
        }
    }

    pub(crate) fn check_letters(&self, alphabet: usize) -> Result<()> {
        for (i, l) in self.prefix.iter().chain(&self.cycle).enumerate() {
            if l.index() >= alphabet {
                return Err(Error::schema(
                    format!("lasso[{i}]"),
                    format!("letter {:#b} uses an unknown proposition", l.0),
                ));
            }
        }
        Ok(())
    }
}

/// True iff some run over the lasso, with ε-moves anywhere, visits every
/// accepting set infinitely often.
pub fn lasso_accepted(a: &Ldgba, w: &Lasso) -> Result<bool> {
    w.check_letters(a.props().alphabet_size())?;
    let len = w.len();
    let node = |q: usize, pos: usize| q * len + pos;
    let mut g: DiGraph<(), bool> = DiGraph::with_capacity(a.num_states() * len, 0);
    for _ in 0..a.num_states() * len {
        g.add_node(());
    }
    for q in 0..a.num_states() {
        for pos in 0..len {
            let from = NodeIndex::new(node(q, pos));
            for &t in a.successors(q, w.at(pos)) {
                g.add_edge(from, NodeIndex::new(node(t, w.next_position(pos))), true);
            }
            for &t in a.epsilon_successors(q) {
                g.add_edge(from, NodeIndex::new(node(t, pos)), false);
            }
        }
    }
    let reachable = reachable_from(&g, NodeIndex::new(node(a.initial(), 0)));
    let full = a.full_mask();
    let mut comp = vec![usize::MAX; g.node_count()];
    let sccs = tarjan_scc(&g);
    for (c, scc) in sccs.iter().enumerate() {
        for n in scc {
            comp[n.index()] = c;
        }
    }
    for (c, scc) in sccs.iter().enumerate() {
        if !reachable[scc[0].index()] {
            continue;
        }
        let consumes = g.edge_indices().any(|e| {
            let (x, y) = g.edge_endpoints(e).unwrap();
            g[e] && comp[x.index()] == c && comp[y.index()] == c
        });
        if !consumes {
            continue;
        }
        let seen: SetMask = scc.iter().fold(0, |m, n| m | a.membership(n.index() / len));
        if seen & full == full {
            return Ok(true);
        }
    }
    Ok(false)
}

pub(crate) fn reachable_from<N, E>(g: &DiGraph<N, E>, start: NodeIndex) -> Vec<bool> {
    let mut seen = vec![false; g.node_count()];
    let mut stack = vec![start];
    seen[start.index()] = true;
    while let Some(n) = stack.pop() {
        for m in g.neighbors(n) {
            if !seen[m.index()] {
                seen[m.index()] = true;
                stack.push(m);
            }
        }
    }
    seen
}
