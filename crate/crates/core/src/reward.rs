//! Accepting-state reward, state-dependent discount and path returns.

use serde::{Deserialize, Serialize};

use crate::product::{Product, ProductState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RewardConfig {
    /// Discount on non-accepting states, in `(0, 1)`.
    pub gamma_f: f64,
    /// Discount on accepting states, in `(0, 1)`; the reward there is `1 - r_f`.
    pub r_f: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            gamma_f: 0.9999,
            r_f: 0.99,
        }
    }
}

impl RewardConfig {
    pub fn reward(&self, accepting: bool) -> f64 {
        if accepting {
            1.0 - self.r_f
        } else {
            0.0
        }
    }

    pub fn discount(&self, accepting: bool) -> f64 {
        if accepting {
            self.r_f
        } else {
            self.gamma_f
        }
    }

    pub fn is_valid(&self) -> bool {
        (0.0..1.0).contains(&self.gamma_f)
            && self.gamma_f > 0.0
            && (0.0..1.0).contains(&self.r_f)
            && self.r_f > 0.0
    }
}

/// `1 - r_F` when `x` lies in any accepting set with its index pending.
pub fn reward(p: &Product<'_>, x: &ProductState, cfg: &RewardConfig) -> f64 {
    cfg.reward(p.is_accepting(x))
}

pub fn discount(p: &Product<'_>, x: &ProductState, cfg: &RewardConfig) -> f64 {
    cfg.discount(p.is_accepting(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathReturn {
    pub value: f64,
    /// Upper bound on what the unobserved continuation could add.
    pub truncation_error_bound: f64,
}

/// Discounted return of a finite path given its accepting pattern.
pub fn path_return(accepting: &[bool], cfg: &RewardConfig) -> PathReturn {
    let mut value = 0.0;
    let mut weight = 1.0;
    for &acc in accepting {
        value += weight * cfg.reward(acc);
        weight *= cfg.discount(acc);
    }
    PathReturn {
        value,
        truncation_error_bound: cfg.r_f.max(cfg.gamma_f).powi(accepting.len() as i32),
    }
}

pub fn path_return_of(p: &Product<'_>, path: &[ProductState], cfg: &RewardConfig) -> PathReturn {
    let acc: Vec<bool> = path.iter().map(|x| p.is_accepting(x)).collect();
    path_return(&acc, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub holds: bool,
    /// `D(x_t)`, computed over the whole path.
    pub value: f64,
    /// `D(x_t[t+1:])`, computed over the same horizon minus one step.
    pub suffix: f64,
    /// Slacks of `0 ≤ γ_F·D'`, `γ_F·D' ≤ D`, `D ≤ 1 - r_F + r_F·D'`,
    /// `1 - r_F + r_F·D' ≤ 1`, in that order.
    pub slacks: [f64; 4],
}

/// Checks the chain `0 ≤ γ_F·D' ≤ D ≤ 1 - r_F + r_F·D' ≤ 1` between a path
/// and its one-step suffix. `tolerance` absorbs rounding.
pub fn check_return_bounds(accepting: &[bool], cfg: &RewardConfig, tolerance: f64) -> BoundCheck {
    assert!(
        accepting.len() >= 2,
        "bound check needs at least two states"
    );
    let d = path_return(accepting, cfg).value;
    let d1 = path_return(&accepting[1..], cfg).value;
    let lower = cfg.gamma_f * d1;
    let upper = 1.0 - cfg.r_f + cfg.r_f * d1;
    let slacks = [lower, d - lower, upper - d, 1.0 - upper];
    BoundCheck {
        holds: slacks.iter().all(|&s| s >= -tolerance),
        value: d,
        suffix: d1,
        slacks,
    }
}
