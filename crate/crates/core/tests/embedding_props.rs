mod common;

use std::collections::BTreeSet;

use common::*;
use ltlrl::automata::{builtin_automaton, lasso_accepted, Ldgba, SetMask};
use ltlrl::embedding::*;
use ltlrl::models::random_ldgba;
use ltlrl::props::Letter;
use proptest::prelude::*;

const MODES: [ResetMode; 3] = [ResetMode::Immediate, ResetMode::Deferred, ResetMode::Frozen];

fn to_set(m: SetMask, f: usize) -> BTreeSet<usize> {
    (0..f).filter(|j| m & (1 << j) != 0).collect()
}

fn from_set(s: &BTreeSet<usize>) -> SetMask {
    s.iter().fold(0, |m, j| m | 1 << j)
}

/// Set-level restatement of the frontier update for each reset mode.
fn oracle_update(
    member: &BTreeSet<usize>,
    t: &BTreeSet<usize>,
    f: usize,
    mode: ResetMode,
) -> BTreeSet<usize> {
    let all: BTreeSet<usize> = (0..f).collect();
    match mode {
        ResetMode::Frozen => all,
        ResetMode::Immediate => {
            if member.is_disjoint(t) {
                return t.clone();
            }
            let rest: BTreeSet<usize> = t.difference(member).copied().collect();
            if !rest.is_empty() {
                return rest;
            }
            let fresh: BTreeSet<usize> = all.difference(t).copied().collect();
            if fresh.is_empty() {
                all
            } else {
                fresh
            }
        }
        ResetMode::Deferred => {
            if t.is_empty() {
                if member.is_empty() {
                    BTreeSet::new()
                } else {
                    all.difference(member).copied().collect()
                }
            } else {
                t.difference(member).copied().collect()
            }
        }
    }
}

#[test]
fn frontier_update_exhaustive() {
    for f in 1..=3usize {
        let full = (1u64 << f) - 1;
        for member in 0..=full {
            for t in 0..=full {
                for mode in MODES {
                    if mode == ResetMode::Immediate && t == 0 {
                        continue;
                    }
                    let got = frontier_mask_update(member, full, t, mode);
                    let want = from_set(&oracle_update(&to_set(member, f), &to_set(t, f), f, mode));
                    assert_eq!(got, want, "f={f} member={member:b} t={t:b} {mode:?}");
                    if mode == ResetMode::Immediate {
                        assert_ne!(got, 0);
                    }
                }
            }
        }
    }
}

#[test]
fn frontier_update_on_phi_e() {
    let a = builtin_automaton("phi_e").unwrap();
    assert_eq!(frontier_update(&a, 1, 0b11), 0b10);
    assert_eq!(frontier_update(&a, 2, 0b10), 0b11 & !0b10);
    assert_eq!(frontier_update(&a, 0, 0b10), 0b10);
}

fn random_automaton() -> impl Strategy<Value = Ldgba> {
    any::<u64>().prop_map(random_ldgba)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn embedding_preserves_language(a in random_automaton(), w in lasso(4, 4, 6)) {
        let base = lasso_accepted(&a, &w).unwrap();
        for mode in MODES {
            prop_assert_eq!(embedded_lasso_accepted(&a, &w, mode).unwrap(), base, "{:?}", mode);
        }
    }

    #[test]
    fn builtin_embedding_preserves_language(idx in 0usize..4, w in lasso(32, 4, 6)) {
        let name = ltlrl::automata::BUILTIN_NAMES[idx];
        let a = builtin_automaton(name).unwrap();
        let size = a.props().alphabet_size() as u32;
        let w = ltlrl::automata::Lasso::new(
            w.prefix.iter().map(|l| Letter(l.0 % size)).collect(),
            w.cycle.iter().map(|l| Letter(l.0 % size)).collect(),
        );
        let base = lasso_accepted(&a, &w).unwrap();
        prop_assert_eq!(embedded_lasso_accepted(&a, &w, ResetMode::Immediate).unwrap(), base);
    }

    #[test]
    fn runs_follow_steps(a in random_automaton(), word in prop::collection::vec((0u32..4).prop_map(Letter), 0..40)) {
        let run = generate_run(&a, &word, word.len(), ResetMode::Immediate);
        prop_assert_eq!(run.states.len(), run.flags.len());
        let mut t = a.full_mask();
        for i in 1..run.states.len() {
            let x = run.states[i];
            prop_assert_eq!(x.frontier, t);
            prop_assert_ne!(x.frontier, 0);
            prop_assert_eq!(run.flags[i], a.membership(x.q) & x.frontier);
            for j in 1..=a.num_sets() {
                prop_assert_eq!(is_accepting_embedded(&a, x, j).unwrap(), run.flags[i] & (1 << (j - 1)) != 0);
            }
            t = frontier_update(&a, x.q, t);
        }
    }
}
