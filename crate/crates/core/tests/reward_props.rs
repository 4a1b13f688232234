use ltlrl::reward::{check_return_bounds, path_return, RewardConfig};
use proptest::prelude::*;

/// Return of a pattern as a backward recursion `D_t = R_t + γ_t · D_{t+1}`.
fn backward_return(accepting: &[bool], cfg: &RewardConfig) -> f64 {
    accepting.iter().rev().fold(0.0, |d, &acc| {
        if acc {
            (1.0 - cfg.r_f) + cfg.r_f * d
        } else {
            cfg.gamma_f * d
        }
    })
}

fn configs() -> impl Strategy<Value = RewardConfig> {
    (0.5f64..0.999, 0.0f64..1.0).prop_map(|(r_f, frac)| {
        let gamma_f = r_f + (1.0 - r_f) * frac * 0.999;
        RewardConfig { gamma_f, r_f }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn forward_and_backward_returns_agree(acc in prop::collection::vec(any::<bool>(), 0..300), cfg in configs()) {
        let d = path_return(&acc, &cfg).value;
        prop_assert!((d - backward_return(&acc, &cfg)).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&d));
    }

    #[test]
    fn bound_chain_holds(acc in prop::collection::vec(any::<bool>(), 2..300), cfg in configs()) {
        let check = check_return_bounds(&acc, &cfg, 1e-9);
        prop_assert!(check.holds, "{:?}", check);
        if acc[0] {
            prop_assert!(check.slacks[2].abs() < 1e-12);
        } else {
            prop_assert!(check.slacks[1].abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_bound_covers_any_continuation(
        acc in prop::collection::vec(any::<bool>(), 1..120),
        tail in prop::collection::vec(any::<bool>(), 0..200),
        cfg in configs(),
    ) {
        let head = path_return(&acc, &cfg);
        let mut whole = acc.clone();
        whole.extend(&tail);
        let extra = path_return(&whole, &cfg).value - head.value;
        prop_assert!(extra >= -1e-12);
        prop_assert!(extra <= head.truncation_error_bound + 1e-12);
    }
}
