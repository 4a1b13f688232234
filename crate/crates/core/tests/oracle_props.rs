use std::collections::BTreeSet;

use ltlrl::automata::builtin_automaton;
use ltlrl::embedding::ResetMode;
use ltlrl::models;
use ltlrl::oracle::*;
use ltlrl::product::{enumerate_product, ExplicitProduct, Product};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_product(seed: u64, mode: ResetMode) -> ExplicitProduct {
    let m = models::random_grid(seed);
    let a = models::random_ldgba(seed);
    let p = Product::new(&m, &a, mode);
    enumerate_product(&p, 100_000).unwrap()
}

fn example_product(mode: ResetMode) -> ExplicitProduct {
    let m = models::example_mdp();
    let a = builtin_automaton("phi_e").unwrap();
    enumerate_product(&Product::new(&m, &a, mode), 1000).unwrap()
}

/// Reachability closure restricted to the allowed state-action pairs.
fn closure(ep: &ExplicitProduct, alive: &[bool], allowed: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = ep.len();
    (0..n)
        .map(|s| {
            let mut seen = vec![false; n];
            if !alive[s] {
                return seen;
            }
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for (k, row) in ep.transitions[x].iter().enumerate() {
                    if !allowed[x][k] {
                        continue;
                    }
                    for &(y, _) in row {
                        if alive[y] && !seen[y] {
                            seen[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
            seen
        })
        .collect()
}

/// MEC state sets by mutual-reachability refinement on a dense closure.
fn naive_mecs(ep: &ExplicitProduct) -> BTreeSet<Vec<usize>> {
    let n = ep.len();
    let mut alive = vec![true; n];
    let mut allowed: Vec<Vec<bool>> = ep.actions.iter().map(|a| vec![true; a.len()]).collect();
    loop {
        let reach = closure(ep, &alive, &allowed);
        let same = |x: usize, y: usize| reach[x][y] && reach[y][x];
        let mut changed = false;
        for x in 0..n {
            if !alive[x] {
                continue;
            }
            for k in 0..allowed[x].len() {
                if allowed[x][k]
                    && ep.transitions[x][k]
                        .iter()
                        .any(|&(y, _)| !alive[y] || !same(x, y))
                {
                    allowed[x][k] = false;
                    changed = true;
                }
            }
            if !allowed[x].iter().any(|&b| b) {
                alive[x] = false;
                changed = true;
            }
        }
        if !changed {
            let mut out = BTreeSet::new();
            let mut taken = vec![false; n];
            for x in 0..n {
                if alive[x] && !taken[x] {
                    let class: Vec<usize> = (0..n).filter(|&y| alive[y] && same(x, y)).collect();
                    for &y in &class {
                        taken[y] = true;
                    }
                    out.insert(class);
                }
            }
            return out;
        }
    }
}

fn random_policy(ep: &ExplicitProduct, rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    ep.actions
        .iter()
        .map(|a| Some(rng.gen_range(0..a.len())))
        .collect()
}

#[test]
fn fig1_product_has_a_single_accepting_mec() {
    let ep = example_product(ResetMode::Immediate);
    let mecs = classify_mecs(&ep, &mec_decomposition(&ep));
    assert_eq!(mecs.len(), 1);
    assert_eq!(mecs[0].kind, MecKind::Accepting);
    assert!(max_satisfaction(&ep)
        .values
        .iter()
        .all(|&v| (v - 1.0).abs() < 1e-12));
}

#[test]
fn recurrent_classes_are_all_or_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut products = vec![example_product(ResetMode::Immediate)];
    products.extend((0..5).map(|s| random_product(s, ResetMode::Immediate)));
    for ep in &products {
        for _ in 0..100 {
            let pol = random_policy(ep, &mut rng);
            for class in classify_recurrent_classes(ep, &pol, ep.initial()).unwrap() {
                assert_ne!(class.verdict, Verdict::Partial, "{class:?}");
            }
        }
    }
}

#[test]
fn frozen_product_admits_partial_classes() {
    let ep = example_product(ResetMode::Frozen);
    let m = models::example_mdp();
    let a11 = m.action_index("a11").unwrap();
    let a01 = m.action_index("a01").unwrap();
    let pol: Vec<Option<usize>> = ep
        .states
        .iter()
        .enumerate()
        .map(|(x, st)| {
            let u = if st.s == 0 { a01 } else { a11 };
            ep.action_position(x, ltlrl::product::ProductAction::Mdp(u))
                .or(Some(0))
        })
        .collect();
    let classes = classify_recurrent_classes(&ep, &pol, ep.initial()).unwrap();
    assert!(classes.iter().any(|c| c.verdict == Verdict::Partial));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mec_decomposition_matches_naive(seed in 0u64..10_000) {
        let ep = random_product(seed, ResetMode::Immediate);
        let mecs = mec_decomposition(&ep);
        let got: BTreeSet<Vec<usize>> = mecs.iter().map(|c| c.states.clone()).collect();
        prop_assert_eq!(got, naive_mecs(&ep));
        for c in &mecs {
            for (i, &x) in c.states.iter().enumerate() {
                prop_assert!(!c.actions[i].is_empty());
                for &k in &c.actions[i] {
                    prop_assert!(ep.transitions[x][k].iter().all(|&(y, _)| c.contains(y)));
                }
            }
        }
    }

    #[test]
    fn reachability_is_a_fixed_point(seed in 0u64..10_000) {
        let ep = random_product(seed, ResetMode::Immediate);
        let target = amec_states(&ep, &amec_set(&ep));
        let r = max_reach_probability(&ep, &target);
        for x in 0..ep.len() {
            let v = r.values[x];
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
            if target[x] {
                prop_assert_eq!(v, 1.0);
            } else {
                let best = ep.transitions[x]
                    .iter()
                    .map(|row| row.iter().map(|&(y, p)| p * r.values[y]).sum::<f64>())
                    .fold(0.0, f64::max);
                prop_assert!((best - v).abs() < 1e-8, "x={} v={} best={}", x, v, best);
            }
        }
    }

    #[test]
    fn satisfaction_policy_attains_optimum(seed in 0u64..10_000) {
        let ep = random_product(seed, ResetMode::Immediate);
        let sat = max_satisfaction(&ep);
        for c in &sat.amecs {
            for &x in &c.states {
                prop_assert!((sat.values[x] - 1.0).abs() < 1e-12);
            }
        }
        let pol: Vec<Option<usize>> = sat.policy.iter().map(|&k| Some(k)).collect();
        for &root in &ep.roots {
            let pr = policy_satisfaction_probability(&ep, &pol, root).unwrap();
            prop_assert!((pr - sat.values[root]).abs() < 1e-6, "root {}: {} vs {}", root, pr, sat.values[root]);
        }
    }

    #[test]
    fn no_policy_beats_the_optimum(seed in 0u64..10_000, pseed in any::<u64>()) {
        let ep = random_product(seed, ResetMode::Immediate);
        let sat = max_satisfaction(&ep);
        let mut rng = ChaCha8Rng::seed_from_u64(pseed);
        let pol = random_policy(&ep, &mut rng);
        let pr = policy_satisfaction_probability(&ep, &pol, ep.initial()).unwrap();
        prop_assert!(pr <= sat.values[ep.initial()] + 1e-9);
    }
}
