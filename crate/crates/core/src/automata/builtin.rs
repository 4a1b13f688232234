//! Hand-built automata for the bundled tasks.
//!
//! | name        | formula                                                  |
//! |-------------|----------------------------------------------------------|
//! | `phi_e`     | `□◇r1 ∧ □◇r2`                                            |
//! | `phi_case1` | `◇□t ∧ □¬u`                                              |
//! | `phi_case2` | `□◇Base1 ∧ □◇Base2 ∧ □◇Base3 ∧ □¬Obs`                    |
//! | `phi_case3` | `phi_case2 ∧ □(Sply → ○(¬Sply U (Base1 ∨ Base2 ∨ Base3)))` |
//!
//! `phi_e` follows the three-state shape with `F = {{q1}, {q2}}` and decides
//! by the first of `r1`, `r2` present in a letter. It agrees with the formula
//! on words whose letters never hold `r1` and `r2` together.

use super::{AutState, Ldgba, LdgbaBuilder};
use crate::error::{Error, Result};
use crate::props::{Letter, PropSet};

pub const BUILTIN_NAMES: [&str; 4] = ["phi_e", "phi_case1", "phi_case2", "phi_case3"];

pub fn builtin_automaton(name: &str) -> Result<Ldgba> {
    match name {
        "phi_e" => Ok(phi_e()),
        "phi_case1" => Ok(phi_case1()),
        "phi_case2" => Ok(bases(false)),
        "phi_case3" => Ok(bases(true)),
        _ => Err(Error::UnknownBuiltin(name.to_owned())),
    }
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn phi_e() -> Ldgba {
    let props = PropSet::new(["r0", "r1", "r2"]).unwrap();
    let mut b = LdgbaBuilder::new(props, names(&["q0", "q1", "q2"]));
    let target = |l: Letter| -> AutState {
        if l.contains(1) {
            1
        } else if l.contains(2) {
            2
        } else {
            0
        }
    };
    for q in 0..3 {
        for t in 0..3 {
            b.edges_where(q, t, |l| target(l) == t);
        }
    }
    b.accepting_set(vec![1]).accepting_set(vec![2]);
    b.build()
}

fn phi_case1() -> Ldgba {
    let props = PropSet::new(["t", "u"]).unwrap();
    let (t, u) = (0, 1);
    let mut b = LdgbaBuilder::new(props, names(&["q0", "q1", "sink"]));
    b.nondeterministic(0);
    b.edges_where(0, 0, |l| !l.contains(u));
    b.edges_where(0, 2, |l| l.contains(u));
    b.epsilon(0, 1);
    b.edges_where(1, 1, |l| l.contains(t) && !l.contains(u));
    b.edges_where(1, 2, |l| !(l.contains(t) && !l.contains(u)));
    b.edges_where(2, 2, |_| true);
    b.accepting_set(vec![1]);
    b.build()
}

/// States `b{subset}` record the bases held by the last letter; with
/// `supply`, a `+` suffix marks an open supply obligation.
fn bases(supply: bool) -> Ldgba {
    let mut prop_names = vec!["Base1", "Base2", "Base3", "Obs"];
    if supply {
        prop_names.push("Sply");
    }
    let props = PropSet::new(prop_names).unwrap();
    let (obs, sply) = (3, 4);
    let base_bits = |l: Letter| (l.0 & 0b111) as usize;
    let pending_levels = if supply { 2 } else { 1 };
    let index = |subset: usize, pending: usize| subset * pending_levels + pending;
    let sink = 8 * pending_levels;

    let mut states = Vec::with_capacity(sink + 1);
    for subset in 0..8 {
        for pending in 0..pending_levels {
            let members: String = (0..3)
                .filter(|i| subset & (1 << i) != 0)
                .map(|i| char::from(b'1' + i as u8))
                .collect();
            states.push(format!("b{members}{}", if pending == 1 { "+" } else { "" }));
        }
    }
    states.push("sink".into());
    let mut b = LdgbaBuilder::new(props.clone(), states);
    b.initial(index(0, 0));

    let next = |pending: usize, l: Letter| -> Option<usize> {
        if l.contains(obs) {
            return None;
        }
        let has_base = base_bits(l) != 0;
        let has_sply = supply && l.contains(sply);
        if pending == 1 && !has_base && has_sply {
            return None;
        }
        let open = if pending == 1 && !has_base {
            1
        } else {
            usize::from(has_sply)
        };
        Some(index(base_bits(l), open))
    };
    for subset in 0..8 {
        for pending in 0..pending_levels {
            let q = index(subset, pending);
            for l in props.letters() {
                b.edge(q, l, next(pending, l).unwrap_or(sink));
            }
        }
    }
    b.edges_where(sink, sink, |_| true);
    for j in 0..3 {
        let set = (0..8)
            .filter(|s| s & (1 << j) != 0)
            .flat_map(|s| (0..pending_levels).map(move |p| index(s, p)))
            .collect();
        b.accepting_set(set);
    }
    b.build()
}
