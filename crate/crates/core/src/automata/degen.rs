//! Counter construction reducing `f` accepting sets to one.

use super::{Ldgba, LdgbaBuilder};

/// States are `(q, i)` for `i ∈ 0..f`, named `q#i` and numbered `q * f + i`.
/// Leaving `q` with counter `i` advances the counter iff `q ∈ F_{i+1}`.
/// The single accepting set is `{(q, 0) : q ∈ F_1}`.
pub fn degeneralize(a: &Ldgba) -> Ldgba {
    let f = a.num_sets().max(1);
    let id = |q: usize, i: usize| q * f + i;
    let mut states = Vec::with_capacity(a.num_states() * f);
    for q in 0..a.num_states() {
        for i in 0..f {
            states.push(if f == 1 {
                a.state_name(q).to_owned()
            } else {
                format!("{}#{i}", a.state_name(q))
            });
        }
    }
    let mut b = LdgbaBuilder::new(a.props().clone(), states);
    b.initial(id(a.initial(), 0));
    let advance = |q: usize, i: usize| {
        if a.membership(q) & (1 << i) != 0 {
            (i + 1) % f
        } else {
            i
        }
    };
    for q in 0..a.num_states() {
        for i in 0..f {
            if !a.is_deterministic(q) {
                b.nondeterministic(id(q, i));
            }
            let j = advance(q, i);
            for l in a.props().letters() {
                for &t in a.successors(q, l) {
                    b.edge(id(q, i), l, id(t, j));
                }
            }
            for &t in a.epsilon_successors(q) {
                b.epsilon(id(q, i), id(t, j));
            }
        }
    }
    let first = a.accepting_sets().first().cloned().unwrap_or_default();
    b.accepting_set(first.into_iter().map(|q| id(q, 0)).collect());
    b.build()
}
