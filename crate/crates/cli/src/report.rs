//! Exact cross-check of learned results on the enumerated product.

use std::collections::BTreeMap;

use ltlrl::learning::{greedy_action, QTable};
use ltlrl::oracle::{
    brute_force_deterministic_policies, classify_mecs, classify_recurrent_classes,
    max_satisfaction, mec_decomposition, policy_satisfaction_probability, ClassifiedMec, MecKind,
    SatisfactionResult, Verdict, BRUTE_FORCE_LIMIT,
};
use ltlrl::product::{enumerate_from, enumerate_product, ExplicitProduct, Product};
use ltlrl::Error as CoreError;
use serde::Serialize;

use crate::error::Result;

/// The product enumerated from every start state, with its exact optimum.
pub struct Analysis {
    pub ep: ExplicitProduct,
    pub sat: SatisfactionResult,
    pub mecs: Vec<ClassifiedMec>,
}

/// `Ok(None)` when the product has more than `cap` states.
pub fn analyse(p: &Product<'_>, cap: usize) -> Result<Option<Analysis>> {
    let mut roots = vec![p.initial_state()];
    roots.extend(p.all_start_states());
    let ep = match enumerate_from(p, &roots, cap) {
        Ok(ep) => ep,
        Err(CoreError::BudgetExceeded { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let sat = max_satisfaction(&ep);
    let mecs = classify_mecs(&ep, &mec_decomposition(&ep));
    Ok(Some(Analysis { ep, sat, mecs }))
}

impl Analysis {
    /// The learned greedy policy as action positions over every enumerated state.
    pub fn policy_of(&self, p: &Product<'_>, table: &QTable) -> Vec<Option<usize>> {
        self.ep
            .states
            .iter()
            .enumerate()
            .map(|(x, st)| self.ep.action_position(x, greedy_action(p, table, st)))
            .collect()
    }
}

fn one_based(mask: u64) -> Vec<usize> {
    (0..64)
        .filter(|j| mask & (1 << j) != 0)
        .map(|j| j + 1)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MecEntry {
    pub kind: MecKind,
    /// One-based accepting sets the component intersects.
    pub sets: Vec<usize>,
    pub states: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum BruteForceEntry {
    Evaluated {
        policies: usize,
        satisfying: usize,
        best_probability: f64,
        exists: bool,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassEntry {
    pub verdict: Verdict,
    pub sets: Vec<usize>,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LearnedCheck {
    pub repetition: usize,
    pub seed: u64,
    pub value_at_x0: f64,
    /// Probability, from the initial state, that the greedy policy satisfies the task.
    pub satisfaction_probability: f64,
    pub recurrent_classes: Vec<ClassEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StartEntry {
    pub state: String,
    pub learned: f64,
    pub oracle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub product_states: usize,
    pub state_action_pairs: usize,
    pub accepting_sets: usize,
    pub initial: String,
    pub initial_max_probability: f64,
    pub mecs: Vec<MecEntry>,
    /// Maximal satisfaction probability per product state.
    pub max_probability: BTreeMap<String, f64>,
    /// Over the product rooted at the initial state only.
    pub brute_force: BruteForceEntry,
    pub learned: Vec<LearnedCheck>,
    /// Learned value against the optimum at each start state, first repetition.
    pub start_states: Vec<StartEntry>,
    pub max_start_gap: Option<f64>,
}

pub fn brute_force_entry(p: &Product<'_>, cap: usize) -> Result<BruteForceEntry> {
    let ep = match enumerate_product(p, cap) {
        Ok(ep) => ep,
        Err(CoreError::BudgetExceeded { cap, .. }) => {
            return Ok(BruteForceEntry::Skipped {
                reason: format!("product exceeds {cap} states"),
            })
        }
        Err(e) => return Err(e.into()),
    };
    Ok(
        match brute_force_deterministic_policies(&ep, BRUTE_FORCE_LIMIT) {
            Ok(r) => BruteForceEntry::Evaluated {
                policies: r.policies,
                satisfying: r.satisfying,
                best_probability: r.best_probability,
                exists: r.exists(),
            },
            Err(e @ CoreError::PolicyBudgetExceeded { .. }) => BruteForceEntry::Skipped {
                reason: e.to_string(),
            },
            Err(e) => return Err(e.into()),
        },
    )
}

pub fn learned_check(
    a: &Analysis,
    p: &Product<'_>,
    table: &QTable,
    repetition: usize,
    seed: u64,
) -> Result<LearnedCheck> {
    let pol = a.policy_of(p, table);
    let start = a.ep.initial();
    let classes = classify_recurrent_classes(&a.ep, &pol, start)?;
    Ok(LearnedCheck {
        repetition,
        seed,
        value_at_x0: table.value(&p.initial_state()),
        satisfaction_probability: policy_satisfaction_probability(&a.ep, &pol, start)?,
        recurrent_classes: classes
            .iter()
            .map(|c| ClassEntry {
                verdict: c.verdict,
                sets: one_based(c.mask),
                size: c.states.len(),
            })
            .collect(),
    })
}

/// Builds the report; `learned` pairs each repetition's table with its seed.
pub fn oracle_report(
    a: &Analysis,
    p: &Product<'_>,
    cap: usize,
    learned: &[(usize, u64, &QTable)],
) -> Result<OracleReport> {
    let ep = &a.ep;
    let name = |x: usize| p.encode(&ep.states[x]);
    let mecs = a
        .mecs
        .iter()
        .map(|m| MecEntry {
            kind: m.kind,
            sets: one_based(m.mask),
            states: m.component.states.iter().map(|&x| name(x)).collect(),
        })
        .collect();
    let max_probability = (0..ep.len()).map(|x| (name(x), a.sat.values[x])).collect();
    let checks = learned
        .iter()
        .map(|&(rep, seed, table)| learned_check(a, p, table, rep, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut start_states = Vec::new();
    if let Some(&(_, _, table)) = learned.first() {
        let mut seen = std::collections::BTreeSet::new();
        for x in p.all_start_states() {
            if seen.insert(x) {
                let i = ep.index[&x];
                start_states.push(StartEntry {
                    state: name(i),
                    learned: table.value(&x),
                    oracle: a.sat.values[i],
                });
            }
        }
    }
    let max_start_gap = start_states
        .iter()
        .map(|s| (s.learned - s.oracle).abs())
        .reduce(f64::max);
    Ok(OracleReport {
        product_states: ep.len(),
        state_action_pairs: ep.actions.iter().map(Vec::len).sum(),
        accepting_sets: ep.num_sets,
        initial: name(ep.initial()),
        initial_max_probability: a.sat.values[ep.initial()],
        mecs,
        max_probability,
        brute_force: brute_force_entry(p, cap)?,
        learned: checks,
        start_states,
        max_start_gap,
    })
}
