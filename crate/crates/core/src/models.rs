//! Bundled environments and seeded random instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::{Ldgba, LdgbaBuilder};
use crate::mdp::{build_grid_env, CellLabel, GridSpec, PlMdp, PlMdpBuilder};
use crate::props::{Letter, PropSet};

/// Three states `s0, s1, s2` labelled `r0, r1, r2`; `a_ij` moves from `s_i`
/// to `s_j` with certainty.
pub fn example_mdp() -> PlMdp {
    let props = PropSet::new(["r0", "r1", "r2"]).unwrap();
    let states = ["s0", "s1", "s2"].map(String::from).to_vec();
    let actions = ["a01", "a02", "a10", "a11", "a20", "a22"]
        .map(String::from)
        .to_vec();
    let mut b = PlMdpBuilder::new(states, actions, props);
    for (a, (from, to)) in [(0, 1), (0, 2), (1, 0), (1, 1), (2, 0), (2, 2)]
        .into_iter()
        .enumerate()
    {
        b.transition(from, a, to, 1.0);
    }
    for s in 0..3 {
        b.label(s, Letter(1 << s), 1.0);
    }
    b.initial(0, Letter(1));
    b.build()
}

fn cell(r: usize, c: usize, label: &[&str], p: f64) -> CellLabel {
    CellLabel {
        at: [r, c],
        label: label.iter().map(|s| s.to_string()).collect(),
        p,
    }
}

/// Three rows by four columns, row 0 north. Targets `t` at (0,3) and (2,3),
/// unsafe cells `u` at (2,0) and (2,2), start (0,0), slip 0.1.
pub fn case1_spec() -> GridSpec {
    GridSpec {
        width: 4,
        height: 3,
        slip: 0.1,
        initial_cell: [0, 0],
        cells: vec![
            cell(0, 3, &["t"], 1.0),
            cell(2, 3, &["t"], 1.0),
            cell(2, 0, &["u"], 1.0),
            cell(2, 2, &["u"], 1.0),
        ],
        props: Some(vec!["t".into(), "u".into()]),
        initial_label: None,
    }
}

pub fn case1_grid() -> PlMdp {
    build_grid_env(&case1_spec()).unwrap()
}

/// Surveillance workspace of `n × n` cells.
///
/// Bases sit near three corners, a supply cell near the fourth; a wall of
/// certain obstacles runs across the middle with a gap, and cells beside
/// the gap hold an obstacle with probability 0.1. Two base cells are only
/// present with probability 0.9 (else unlabelled). Start is the bottom-middle cell.
pub fn case2_spec(n: usize) -> GridSpec {
    assert!(n >= 5, "surveillance workspace needs at least 5x5 cells");
    let last = n - 1;
    let mid = n / 2;
    let mut cells = vec![
        cell(0, last, &["Base1"], 1.0),
        cell(last, last, &["Base2"], 0.9),
        cell(last, last - 1, &["Base2"], 1.0),
        cell(last, 0, &["Base3"], 0.9),
        cell(last, 1, &["Base3"], 1.0),
        cell(0, mid, &["Sply"], 1.0),
    ];
    cells.push(cell(last, last, &[], 0.1));
    cells.push(cell(last, 0, &[], 0.1));
    let gap = mid;
    for c in 1..last {
        if c == gap {
            continue;
        }
        if c + 1 == gap || c == gap + 1 {
            cells.push(cell(mid, c, &["Obs"], 0.1));
            cells.push(cell(mid, c, &[], 0.9));
        } else {
            cells.push(cell(mid, c, &["Obs"], 1.0));
        }
    }
    GridSpec {
        width: n,
        height: n,
        slip: 0.1,
        initial_cell: [last, mid],
        cells,
        props: Some(
            ["Base1", "Base2", "Base3", "Obs", "Sply"]
                .map(String::from)
                .to_vec(),
        ),
        initial_label: None,
    }
}

pub fn case2_grid(n: usize) -> PlMdp {
    build_grid_env(&case2_spec(n)).unwrap()
}

/// A seeded `5 × 5` grid over propositions `a, b`.
///
/// Each cell independently carries `a` or `b` with probability 0.15 each;
/// a fifth of the labelled cells show their label with probability 0.8 only.
/// Slip is uniform in `[0, 0.2]`.
pub fn random_grid(seed: u64) -> PlMdp {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 5;
    let slip = (rng.gen_range(0.0..0.2f64) * 100.0).round() / 100.0;
    let mut cells = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let u: f64 = rng.gen();
            let prop = if u < 0.15 {
                "a"
            } else if u < 0.30 {
                "b"
            } else {
                continue;
            };
            if rng.gen_bool(0.2) {
                cells.push(cell(r, c, &[prop], 0.8));
                cells.push(cell(r, c, &[], 0.2));
            } else {
                cells.push(cell(r, c, &[prop], 1.0));
            }
        }
    }
    cells.retain(|x| x.at != [0, 0]);
    let spec = GridSpec {
        width: n,
        height: n,
        slip,
        initial_cell: [0, 0],
        cells,
        props: Some(vec!["a".into(), "b".into()]),
        initial_label: Some(vec![]),
    };
    build_grid_env(&spec).unwrap()
}

/// A seeded LDGBA over `a, b` with two accepting sets.
///
/// `Q_D` has 2 or 3 states with uniformly random successors; with
/// probability one half a single `Q_N` initial state is added that loops on
/// every letter and has one or two ε-edges into `Q_D`. Each `F_j` is a
/// random nonempty subset of `Q_D`.
pub fn random_ldgba(seed: u64) -> Ldgba {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_a07a);
    let props = PropSet::new(["a", "b"]).unwrap();
    let n_d = rng.gen_range(2..=3);
    let with_n = rng.gen_bool(0.5);
    let offset = usize::from(with_n);
    let mut names = Vec::new();
    if with_n {
        names.push("n0".to_string());
    }
    names.extend((0..n_d).map(|i| format!("d{i}")));
    let mut b = LdgbaBuilder::new(props.clone(), names);
    if with_n {
        b.nondeterministic(0).edges_where(0, 0, |_| true);
        let mut targets: Vec<usize> = (offset..offset + n_d).collect();
        targets.shuffle(&mut rng);
        for &t in &targets[..rng.gen_range(1..=2)] {
            b.epsilon(0, t);
        }
    }
    for q in offset..offset + n_d {
        for l in props.letters() {
            b.edge(q, l, offset + rng.gen_range(0..n_d));
        }
    }
    for _ in 0..2 {
        let mut set: Vec<usize> = (offset..offset + n_d)
            .filter(|_| rng.gen_bool(0.4))
            .collect();
        if set.is_empty() {
            set.push(offset + rng.gen_range(0..n_d));
        }
        b.accepting_set(set);
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::validate_ldgba;
    use crate::mdp::validate_plmdp;

    #[test]
    fn bundled_models_validate() {
        assert!(validate_plmdp(&example_mdp()).is_valid());
        assert!(validate_plmdp(&case1_grid()).is_valid());
        for n in [6, 15] {
            assert_eq!(case2_grid(n).num_states(), n * n);
        }
    }

    #[test]
    fn random_instances_are_valid_and_seeded() {
        for seed in 0..20 {
            assert!(validate_plmdp(&random_grid(seed)).is_valid());
            assert!(validate_ldgba(&random_ldgba(seed)).is_valid());
            assert_eq!(random_grid(seed), random_grid(seed));
            assert_eq!(random_ldgba(seed), random_ldgba(seed));
        }
        assert_ne!(random_grid(0), random_grid(1));
    }
}
