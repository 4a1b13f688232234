//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ltlrl::automata::{
    builtin_automaton, degeneralize, lasso_accepted, Lasso, Ldgba, BUILTIN_NAMES,
};
use ltlrl::embedding::{embedded_lasso_accepted, ResetMode};
use ltlrl::mdp::{build_grid_env, CellLabel, GridSpec};
use ltlrl::models;
use ltlrl::oracle::{
    brute_force_deterministic_policies, classify_recurrent_classes, Verdict, BRUTE_FORCE_LIMIT,
};
use ltlrl::product::{enumerate_product, ExplicitProduct, Product};
use ltlrl::props::Letter;
use ltlrl::reward::{check_return_bounds, RewardConfig};
use ltlrl_cli::EmbeddingMode;
use ltlrl_cli::{
    compare, preset, run_experiment, ArtifactBundle, ExperimentConfig, COMPARED_MODES,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Satisfaction probabilities computed exactly, up to value-iteration error.
const EXACT_TOL: f64 = 1e-9;
const VALUE_TOL: f64 = 0.05;
const REFERENCE_TOL: f64 = 0.001;
const BOUND_TOL: f64 = 1e-9;

struct Outcome {
    id: usize,
    title: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
}

fn scratch() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ltlrl-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run_into(cfg: &ExperimentConfig, dir: PathBuf) -> ArtifactBundle {
    let cfg = ExperimentConfig {
        out: Some(dir),
        ..cfg.clone()
    };
    run_experiment(&cfg).expect("experiment runs")
}

fn files_under(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_path_buf();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

/// Artifact directories from the first and second run of each deterministic criterion.
type RunPairs = Vec<(String, PathBuf, PathBuf)>;

fn c1(root: &Path, pairs: &mut RunPairs) -> Outcome {
    let t = Instant::now();
    let m = models::example_mdp();
    let a = builtin_automaton("phi_e").unwrap();
    let standard = enumerate_product(&Product::new(&m, &a, ResetMode::Frozen), 1000).unwrap();
    let embedded = enumerate_product(&Product::new(&m, &a, ResetMode::Immediate), 1000).unwrap();
    let bf_std = brute_force_deterministic_policies(&standard, BRUTE_FORCE_LIMIT).unwrap();
    let bf_ep = brute_force_deterministic_policies(&embedded, BRUTE_FORCE_LIMIT).unwrap();
    let cfg = preset("example").unwrap();
    let b = run_into(&cfg, root.join("c1a"));
    let seconds = t.elapsed().as_secs_f64();
    let learned = b.oracle.as_ref().unwrap().learned[0].satisfaction_probability;
    let pass =
        !bf_std.exists() && bf_ep.exists() && (learned - 1.0).abs() <= EXACT_TOL && seconds < 5.0;
    run_into(&cfg, root.join("c1b"));
    pairs.push(("c1".into(), root.join("c1a"), root.join("c1b")));
    Outcome {
        id: 1,
        title:
            "fig1 example: no deterministic policy on the standard product, one on the EP-MDP, learned",
        pass,
        detail: format!(
            "standard {}/{} satisfying, EP-MDP {}/{} satisfying, learned probability {learned:.9}",
            bf_std.satisfying, bf_std.policies, bf_ep.satisfying, bf_ep.policies
        ),
        seconds,
    }
}

fn c2(root: &Path, pairs: &mut RunPairs) -> Outcome {
    let t = Instant::now();
    let cfg = preset("phi_case1").unwrap();
    let b = run_into(&cfg, root.join("c2a"));
    let seconds = t.elapsed().as_secs_f64();
    let o = b.oracle.as_ref().unwrap();
    let gap = o.max_start_gap.unwrap();
    let at21 = o
        .start_states
        .iter()
        .find(|s| s.state.starts_with("r2_c1|"))
        .unwrap()
        .oracle;
    let from00 = o.learned[0].satisfaction_probability;
    let pass = cfg.learn.episodes <= 20_000
        && cfg.learn.tau == 100
        && gap <= VALUE_TOL
        && (at21 - 0.9).abs() <= REFERENCE_TOL
        && (from00 - 1.0).abs() <= REFERENCE_TOL
        && o.initial.starts_with("r0_c0|")
        && seconds < 120.0;
    run_into(&cfg, root.join("c2b"));
    pairs.push(("c2".into(), root.join("c2a"), root.join("c2b")));
    Outcome {
        id: 2,
        title: "phi_case1 grid: learned values match the oracle at every start state",
        pass,
        detail: format!(
            "{} episodes, max |learned - oracle| {gap:.4} (tol {VALUE_TOL}), oracle (2,1) {at21:.6}, learned policy from (0,0) {from00:.6}",
            cfg.learn.episodes
        ),
        seconds,
    }
}

fn c3(root: &Path, pairs: &mut RunPairs) -> Outcome {
    let t = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    let mut cfgs = Vec::new();
    for i in 0..5u64 {
        let mut cfg = ExperimentConfig::new(format!("random:{i}"), format!("random:{i}"));
        cfg.learn.episodes = 10_000;
        let b = run_into(&cfg, root.join(format!("c3a_{i}")));
        let o = b.oracle.as_ref().unwrap();
        let gap = (o.learned[0].value_at_x0 - o.initial_max_probability).abs();
        pass &= gap <= VALUE_TOL;
        write!(
            detail,
            "#{i} {:.3}/{:.3} ",
            o.learned[0].value_at_x0, o.initial_max_probability
        )
        .unwrap();
        cfgs.push(cfg);
    }
    let seconds = t.elapsed().as_secs_f64();
    pass &= seconds < 300.0;
    for (i, cfg) in cfgs.iter().enumerate() {
        run_into(cfg, root.join(format!("c3b_{i}")));
        pairs.push((
            format!("c3 #{i}"),
            root.join(format!("c3a_{i}")),
            root.join(format!("c3b_{i}")),
        ));
    }
    Outcome {
        id: 3,
        title: "random 5x5 instances: learned value at x0 within 0.05 of the oracle",
        pass,
        detail: format!("learned/oracle {}", detail.trim_end()),
        seconds,
    }
}

fn random_lasso(rng: &mut ChaCha8Rng, alphabet: usize) -> Lasso {
    let (p, c) = (rng.gen_range(0..=4), rng.gen_range(1..=6));
    let mut pick = |n: usize| {
        (0..n)
            .map(|_| Letter(rng.gen_range(0..alphabet as u32)))
            .collect::<Vec<_>>()
    };
    let prefix = pick(p);
    Lasso::new(prefix, pick(c))
}

fn c4() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    let mut accepted = 0;
    let mut total = 0;
    for name in BUILTIN_NAMES {
        let a = builtin_automaton(name).unwrap();
        let d = degeneralize(&a);
        let size = a.props().alphabet_size();
        for _ in 0..1000 {
            let w = random_lasso(&mut rng, size);
            let base = lasso_accepted(&a, &w).unwrap();
            let emb = embedded_lasso_accepted(&a, &w, ResetMode::Immediate).unwrap();
            let deg = lasso_accepted(&d, &w).unwrap();
            mismatches += usize::from(base != emb || base != deg);
            accepted += usize::from(base);
            total += 1;
        }
    }
    let seconds = t.elapsed().as_secs_f64();
    Outcome {
        id: 4,
        title: "language equivalence of embedded, base and degeneralized automata",
        pass: mismatches == 0 && seconds < 30.0,
        detail: format!("{total} lassos, {accepted} accepted, {mismatches} mismatches"),
        seconds,
    }
}

fn grid_4x4() -> GridSpec {
    let cell = |r: usize, c: usize, label: &[&str], p: f64| CellLabel {
        at: [r, c],
        label: label.iter().map(|s| s.to_string()).collect(),
        p,
    };
    GridSpec {
        width: 4,
        height: 4,
        slip: 0.1,
        initial_cell: [0, 0],
        cells: vec![
            cell(0, 0, &["r0"], 1.0),
            cell(0, 3, &["r1"], 1.0),
            cell(3, 3, &["r2"], 0.8),
            cell(3, 3, &[], 0.2),
            cell(3, 0, &["r1"], 0.5),
            cell(3, 0, &["r2"], 0.5),
        ],
        props: Some(vec!["r0".into(), "r1".into(), "r2".into()]),
        initial_label: None,
    }
}

fn partial_classes(ep: &ExplicitProduct, rng: &mut ChaCha8Rng, policies: usize) -> (usize, usize) {
    let mut classes = 0;
    let mut partial = 0;
    for _ in 0..policies {
        let pol: Vec<Option<usize>> = ep
            .actions
            .iter()
            .map(|a| Some(rng.gen_range(0..a.len())))
            .collect();
        for c in classify_recurrent_classes(ep, &pol, ep.initial()).unwrap() {
            classes += 1;
            partial += usize::from(c.verdict == Verdict::Partial);
        }
    }
    (classes, partial)
}

fn c5() -> Outcome {
    let t = Instant::now();
    let a = builtin_automaton("phi_e").unwrap();
    let fig1 = models::example_mdp();
    let grid = build_grid_env(&grid_4x4()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut detail = String::new();
    let mut violations = 0;
    for (name, m) in [("fig1", &fig1), ("4x4", &grid)] {
        let ep = enumerate_product(&Product::new(m, &a, ResetMode::Immediate), 100_000).unwrap();
        let (classes, partial) = partial_classes(&ep, &mut rng, 100);
        violations += partial;
        write!(
            detail,
            "{name}: {} states, {classes} classes, {partial} partial; ",
            ep.len()
        )
        .unwrap();
    }
    Outcome {
        id: 5,
        title: "every recurrent class meets all accepting sets or none",
        pass: violations == 0,
        detail: detail.trim_end_matches("; ").to_string(),
        seconds: t.elapsed().as_secs_f64(),
    }
}

fn c6() -> Outcome {
    let t = Instant::now();
    let cfg = RewardConfig {
        r_f: 0.8,
        gamma_f: 0.9,
    };
    let fig1 = models::example_mdp();
    let phi_e = builtin_automaton("phi_e").unwrap();
    let case2 = models::case2_grid(6);
    let phi2 = builtin_automaton("phi_case2").unwrap();
    let products: [(&_, &Ldgba); 2] = [(&fig1, &phi_e), (&case2, &phi2)];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut min_slack = f64::INFINITY;
    let mut failures = 0;
    let mut accepting_paths = 0;
    for i in 0..1000 {
        let (m, a) = products[i % 2];
        let p = Product::new(m, a, ResetMode::Immediate);
        let mut x = p.sample_start(&mut rng);
        let mut acc = Vec::with_capacity(200);
        for _ in 0..200 {
            acc.push(p.is_accepting(&x));
            let actions = p.available_actions(&x);
            let u = actions[rng.gen_range(0..actions.len())];
            x = p.sample_next(&x, u, &mut rng).unwrap();
        }
        accepting_paths += usize::from(acc.iter().any(|&b| b));
        let check = check_return_bounds(&acc, &cfg, BOUND_TOL);
        failures += usize::from(!check.holds);
        min_slack = check.slacks.iter().copied().fold(min_slack, f64::min);
    }
    Outcome {
        id: 6,
        title: "return bound chain on sampled paths",
        pass: failures == 0 && min_slack >= -BOUND_TOL,
        detail: format!("1000 paths of 200 steps ({accepting_paths} with rewards), {failures} violations, min slack {min_slack:.3e}"),
        seconds: t.elapsed().as_secs_f64(),
    }
}

fn c7(root: &Path) -> Outcome {
    let t = Instant::now();
    let mut cfg = preset("phi_case2").unwrap();
    cfg.repetitions = 20;
    cfg.learn.episodes = 1000;
    cfg.out = Some(root.join("c7"));
    let (cmp, _) = compare(&cfg, &COMPARED_MODES).unwrap();
    let seconds = t.elapsed().as_secs_f64();
    let e = cmp.outcome(EmbeddingMode::Eldgba).unwrap();
    let l = cmp.outcome(EmbeddingMode::LdbaBaseline).unwrap();
    let earlier = match (e.first_half_episode, l.first_half_episode) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    };
    Outcome {
        id: 7,
        title: "reward density: eldgba collects more, and earlier, than the ldba baseline",
        pass: e.final_mean_reward > l.final_mean_reward && earlier && seconds < 600.0,
        detail: format!(
            "20 reps x 1000 episodes: final mean {:.4} vs {:.4}, half-final episode {:?} vs {:?}",
            e.final_mean_reward, l.final_mean_reward, e.first_half_episode, l.first_half_episode
        ),
        seconds,
    }
}

fn c8(root: &Path) -> Outcome {
    let t = Instant::now();
    let mut detail = String::new();
    let mut pass = true;
    for (name, reference) in [("scale15", 450), ("scale25", 1250), ("scale40", 3200)] {
        let cfg = preset(name).unwrap();
        let started = Instant::now();
        let b = run_into(&cfg, root.join(name));
        let r = &b.summary.repetitions[0];
        let states = b.summary.product_states;
        if name == "scale15" {
            pass &= states.is_some() && r.converged_at.is_some();
        }
        write!(
            detail,
            "{name}: {} MDP, {} product (reference {reference}), {} episodes, converged {:?}, {:.1} s; ",
            b.summary.mdp_states,
            states.map_or("-".into(), |n| n.to_string()),
            r.episodes_run,
            r.converged_at,
            started.elapsed().as_secs_f64()
        )
        .unwrap();
    }
    let seconds = t.elapsed().as_secs_f64();
    pass &= seconds < 1800.0;
    Outcome {
        id: 8,
        title: "scalability presets enumerate and train within budget",
        pass,
        detail: detail.trim_end_matches("; ").to_string(),
        seconds,
    }
}

fn c9(pairs: &RunPairs) -> Outcome {
    let t = Instant::now();
    let mut files = 0;
    let mut differing = Vec::new();
    for (name, a, b) in pairs {
        let (fa, fb) = (files_under(a), files_under(b));
        files += fa.len();
        if fa.is_empty() || fa != fb {
            differing.push(name.clone());
        }
    }
    Outcome {
        id: 9,
        title: "artifacts of criteria 1-3 are byte-identical across runs",
        pass: differing.is_empty(),
        detail: format!(
            "{} bundles, {files} files, differing: {differing:?}",
            pairs.len()
        ),
        seconds: t.elapsed().as_secs_f64(),
    }
}

fn main() {
    let root = scratch();
    let mut pairs = RunPairs::new();
    let outcomes = [
        c1(&root, &mut pairs),
        c2(&root, &mut pairs),
        c3(&root, &mut pairs),
        c4(),
        c5(),
        c6(),
        c7(&root),
        c8(&root),
        c9(&pairs),
    ];
    println!();
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] criterion {}: {} ({:.2} s)",
            o.id, o.title, o.seconds
        );
        println!("       {}", o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!(
        "\nacceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    let _ = std::fs::remove_dir_all(&root);
    if failed > 0 {
        std::process::exit(1);
    }
}
