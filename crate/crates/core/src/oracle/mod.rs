//! Exact analysis of enumerated products.

mod chain;
mod mec;
mod reach;

pub use chain::{
    brute_force_deterministic_policies, classify_recurrent_classes, induced_chain,
    policy_satisfaction_probability, BruteForceReport, InducedChain, PolicyVec, RecurrentClass,
    Verdict,
};
pub use mec::{
    amec_set, amec_states, classify_mecs, mec_decomposition, ClassifiedMec, EndComponent, MecKind,
};
pub use reach::{
    discounted_values, max_reach_probability, max_satisfaction, ReachResult, SatisfactionResult,
    VI_MAX_SWEEPS, VI_TOLERANCE,
};

/// Deterministic-policy budget of the brute-force search.
pub const BRUTE_FORCE_LIMIT: usize = 10_000;
