//! Maximal reachability and discounted value iteration.

use serde::Serialize;

use super::mec::{amec_set, amec_states, EndComponent};
use crate::product::ExplicitProduct;
use crate::reward::RewardConfig;

/// Absolute stopping tolerance of every value iteration here.
pub const VI_TOLERANCE: f64 = 1e-10;
pub const VI_MAX_SWEEPS: usize = 1_000_000;

/// Relative slack when collecting value-optimal actions.
const OPTIMAL_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReachResult {
    pub values: Vec<f64>,
    /// Action position per state; reaches the target with maximal probability
    /// from every state.
    pub policy: Vec<usize>,
    pub sweeps: usize,
}

fn expected(row: &[(usize, f64)], v: &[f64]) -> f64 {
    row.iter().map(|&(y, p)| p * v[y]).sum()
}

/// States from which `target` is reachable under some policy.
fn can_reach(ep: &ExplicitProduct, target: &[bool]) -> Vec<bool> {
    let n = ep.len();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        for row in &ep.transitions[x] {
            for &(y, p) in row {
                if p > 0.0 {
                    preds[y].push(x);
                }
            }
        }
    }
    let mut seen = target.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&x| target[x]).collect();
    while let Some(y) = stack.pop() {
        for &x in &preds[y] {
            if !seen[x] {
                seen[x] = true;
                stack.push(x);
            }
        }
    }
    seen
}

/// States with maximal reach probability one, with an almost-sure
/// attractor action for each non-target one.
fn prob1e(ep: &ExplicitProduct, target: &[bool]) -> (Vec<bool>, Vec<Option<usize>>) {
    let n = ep.len();
    let mut u = vec![true; n];
    loop {
        let mut r = target.to_vec();
        let mut choice: Vec<Option<usize>> = vec![None; n];
        loop {
            let mut grew = false;
            for x in 0..n {
                if r[x] || !u[x] {
                    continue;
                }
                for (k, row) in ep.transitions[x].iter().enumerate() {
                    if row.iter().all(|&(y, _)| u[y]) && row.iter().any(|&(y, p)| p > 0.0 && r[y]) {
                        r[x] = true;
                        choice[x] = Some(k);
                        grew = true;
                        break;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        if r == u {
            return (u, choice);
        }
        u = r;
    }
}

/// `max_π Pr(reach target)` from every state.
pub fn max_reach_probability(ep: &ExplicitProduct, target: &[bool]) -> ReachResult {
    let n = ep.len();
    let reach = can_reach(ep, target);
    let (one, attractor) = prob1e(ep, target);
    let mut v: Vec<f64> = (0..n).map(|x| if one[x] { 1.0 } else { 0.0 }).collect();
    let unknown: Vec<usize> = (0..n).filter(|&x| reach[x] && !one[x]).collect();
    let mut sweeps = 0;
    while sweeps < VI_MAX_SWEEPS && !unknown.is_empty() {
        sweeps += 1;
        let mut delta: f64 = 0.0;
        for &x in &unknown {
            let best = ep.transitions[x]
                .iter()
                .map(|row| expected(row, &v))
                .fold(0.0, f64::max);
            delta = delta.max((best - v[x]).abs());
            v[x] = best;
        }
        if delta < VI_TOLERANCE {
            break;
        }
    }
    let policy = reach_policy(ep, target, &v, &one, &attractor);
    ReachResult {
        values: v,
        policy,
        sweeps,
    }
}

/// Among value-optimal actions, prefers ones that make progress towards the
/// target so that end components with value below one are left.
fn reach_policy(
    ep: &ExplicitProduct,
    target: &[bool],
    v: &[f64],
    one: &[bool],
    attractor: &[Option<usize>],
) -> Vec<usize> {
    let n = ep.len();
    let mut policy = vec![0usize; n];
    let mut done: Vec<bool> = (0..n).map(|x| target[x] || one[x]).collect();
    for x in 0..n {
        if let Some(k) = attractor[x] {
            policy[x] = k;
        }
    }
    let optimal: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            (0..ep.actions[x].len())
                .filter(|&k| {
                    expected(&ep.transitions[x][k], v) >= v[x] - OPTIMAL_SLACK * v[x].max(1e-300)
                })
                .collect()
        })
        .collect();
    loop {
        let mut grew = false;
        for x in 0..n {
            if done[x] || v[x] <= 0.0 {
                continue;
            }
            if let Some(&k) = optimal[x].iter().find(|&&k| {
                ep.transitions[x][k]
                    .iter()
                    .any(|&(y, p)| p > 0.0 && done[y])
            }) {
                policy[x] = k;
                done[x] = true;
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    for x in 0..n {
        if !done[x] {
            policy[x] = optimal[x].first().copied().unwrap_or(0);
        }
    }
    policy
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SatisfactionResult {
    /// Maximal probability of satisfying the acceptance condition.
    pub values: Vec<f64>,
    /// A deterministic memoryless policy attaining `values`.
    pub policy: Vec<usize>,
    pub amecs: Vec<EndComponent>,
}

/// Maximal satisfaction probabilities as reachability of the AMEC union,
/// with a policy that, inside each AMEC, returns to states holding a pending
/// accepting set almost surely.
pub fn max_satisfaction(ep: &ExplicitProduct) -> SatisfactionResult {
    let amecs = amec_set(ep);
    let target = amec_states(ep, &amecs);
    let reach = max_reach_probability(ep, &target);
    let mut policy = reach.policy;
    for c in &amecs {
        for (x, k) in in_component_policy(ep, c) {
            policy[x] = k;
        }
    }
    SatisfactionResult {
        values: reach.values,
        policy,
        amecs,
    }
}

/// Positional strategy keeping to `c` and reaching its accepting states
/// with probability one from everywhere in `c`.
fn in_component_policy(ep: &ExplicitProduct, c: &EndComponent) -> Vec<(usize, usize)> {
    let mut r: Vec<bool> = vec![false; ep.len()];
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut assigned = vec![false; c.states.len()];
    for &x in &c.states {
        r[x] = ep.accepting[x] != 0;
    }
    loop {
        let mut grew = false;
        for (i, &x) in c.states.iter().enumerate() {
            if assigned[i] {
                continue;
            }
            if let Some(&k) = c.actions[i]
                .iter()
                .find(|&&k| ep.transitions[x][k].iter().any(|&(y, p)| p > 0.0 && r[y]))
            {
                out.push((x, k));
                assigned[i] = true;
                if !r[x] {
                    r[x] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    for (i, &x) in c.states.iter().enumerate() {
        if !assigned[i] {
            out.push((x, c.actions[i][0]));
        }
    }
    out
}

/// Optimal discounted values with the state-dependent reward and discount.
/// Stops once a sweep changes no value by more than `tolerance · (1 - γ_max)`.
pub fn discounted_values(
    ep: &ExplicitProduct,
    cfg: &RewardConfig,
    tolerance: f64,
) -> (Vec<f64>, usize) {
    let n = ep.len();
    let mut v = vec![0.0; n];
    let gmax = cfg.r_f.max(cfg.gamma_f);
    let eps = tolerance * (1.0 - gmax);
    let mut sweeps = 0;
    while sweeps < VI_MAX_SWEEPS {
        sweeps += 1;
        let mut delta: f64 = 0.0;
        for x in 0..n {
            let acc = ep.accepting[x] != 0;
            let future = ep.transitions[x]
                .iter()
                .map(|row| expected(row, &v))
                .fold(f64::NEG_INFINITY, f64::max);
            let future = if future.is_finite() { future } else { 0.0 };
            let new = cfg.reward(acc) + cfg.discount(acc) * future;
            delta = delta.max((new - v[x]).abs());
            v[x] = new;
        }
        if delta < eps {
            break;
        }
    }
    (v, sweeps)
}
