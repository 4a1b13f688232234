//! Embedded product of a PL-MDP and an LDGBA.
//!
//! A product state `x = (s, l, q, T)` holds the automaton state that has
//! already read `l` together with the frontier *before* `q` is credited, so
//! the accepting sets of `x` are `{j : q ∈ F_j, j ∈ T}`. Leaving `x` applies
//! `T ← f_V(q, T)`; an MDP action then samples `(s', l')` and moves the
//! automaton on `l'`, while an ε-action keeps `(s, l)` and jumps `q`.
//!
//! When the automaton has no move on a letter the product enters the dead
//! component `q = None`, which is never accepting.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::automata::{AutState, Ldgba, SetMask};
use crate::embedding::{effective_frontier, frontier_mask_update, ResetMode};
use crate::error::{Error, Result};
use crate::mdp::{sample, ActionId, PlMdp, StateId};
use crate::props::Letter;
use crate::reward::RewardConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProductState {
    pub s: StateId,
    /// Label over the MDP's propositions.
    pub l: Letter,
    pub q: Option<AutState>,
    pub frontier: SetMask,
}

/// MDP actions order before ε-actions, each by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProductAction {
    Mdp(ActionId),
    /// Index into the ε-successor list of the current automaton state.
    Epsilon(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    pub next: ProductState,
    /// Reward and discount of the state that was left.
    pub reward: f64,
    pub discount: f64,
    /// Accepting sets of the state that was left.
    pub flags: SetMask,
}

pub struct Product<'a> {
    mdp: &'a PlMdp,
    aut: &'a Ldgba,
    mode: ResetMode,
    /// MDP letter to automaton letter, for every label the MDP can emit.
    projection: HashMap<Letter, Letter>,
    /// Automaton states from which no accepting state is reachable.
    hopeless: Vec<bool>,
}

impl<'a> Product<'a> {
    pub fn new(mdp: &'a PlMdp, aut: &'a Ldgba, mode: ResetMode) -> Self {
        let mut projection = HashMap::new();
        for s in 0..mdp.num_states() {
            for &(l, _) in mdp.labels(s) {
                projection
                    .entry(l)
                    .or_insert_with(|| mdp.props().project(l, aut.props()));
            }
        }
        let (_, l0) = mdp.initial();
        projection
            .entry(l0)
            .or_insert_with(|| mdp.props().project(l0, aut.props()));
        Product {
            mdp,
            aut,
            mode,
            projection,
            hopeless: hopeless_states(aut),
        }
    }

    pub fn mdp(&self) -> &'a PlMdp {
        self.mdp
    }

    pub fn automaton(&self) -> &'a Ldgba {
        self.aut
    }

    pub fn mode(&self) -> ResetMode {
        self.mode
    }

    pub fn num_sets(&self) -> usize {
        self.aut.num_sets()
    }

    fn project(&self, l: Letter) -> Letter {
        match self.projection.get(&l) {
            Some(&x) => x,
            None => self.mdp.props().project(l, self.aut.props()),
        }
    }

    fn read(&self, q: AutState, l: Letter) -> Option<AutState> {
        self.aut.successors(q, self.project(l)).first().copied()
    }

    /// The start state over `(s, l)`: the automaton has read `l` from `q0`
    /// and the frontier is full.
    pub fn start_state(&self, s: StateId, l: Letter) -> ProductState {
        match self.read(self.aut.initial(), l) {
            Some(q) => ProductState {
                s,
                l,
                q: Some(q),
                frontier: self.aut.full_mask(),
            },
            None => ProductState {
                s,
                l,
                q: None,
                frontier: 0,
            },
        }
    }

    pub fn initial_state(&self) -> ProductState {
        let (s0, l0) = self.mdp.initial();
        self.start_state(s0, l0)
    }

    /// Start states over every `(s, l)` with `p_L(s, l) > 0`.
    pub fn all_start_states(&self) -> Vec<ProductState> {
        let mut out = Vec::new();
        for s in 0..self.mdp.num_states() {
            for &(l, p) in self.mdp.labels(s) {
                if p > 0.0 {
                    out.push(self.start_state(s, l));
                }
            }
        }
        out
    }

    /// A start state over a uniformly drawn MDP state and a sampled label.
    pub fn sample_start<R: Rng + ?Sized>(&self, rng: &mut R) -> ProductState {
        let s = rng.gen_range(0..self.mdp.num_states());
        let l = self.mdp.sample_label(s, rng);
        self.start_state(s, l)
    }

    pub fn is_dead(&self, x: &ProductState) -> bool {
        x.q.is_none()
    }

    /// True when no continuation of `x` can ever be accepting; every return
    /// from `x` is zero.
    pub fn is_hopeless(&self, x: &ProductState) -> bool {
        x.q.is_none_or(|q| self.hopeless[q])
    }

    /// Accepting-set indices of `x` as a mask.
    pub fn flags(&self, x: &ProductState) -> SetMask {
        match x.q {
            Some(q) => {
                self.aut.membership(q)
                    & effective_frontier(self.aut.full_mask(), x.frontier, self.mode)
            }
            None => 0,
        }
    }

    pub fn is_accepting(&self, x: &ProductState) -> bool {
        self.flags(x) != 0
    }

    pub fn available_actions(&self, x: &ProductState) -> Vec<ProductAction> {
        let mut out: Vec<ProductAction> = self
            .mdp
            .available(x.s)
            .iter()
            .map(|&a| ProductAction::Mdp(a))
            .collect();
        if let Some(q) = x.q {
            if !self.aut.is_deterministic(q) {
                out.extend((0..self.aut.epsilon_successors(q).len()).map(ProductAction::Epsilon));
            }
        }
        out
    }

    pub fn is_available(&self, x: &ProductState, u: ProductAction) -> bool {
        match u {
            ProductAction::Mdp(a) => self.mdp.is_available(x.s, a),
            ProductAction::Epsilon(k) => x.q.is_some_and(|q| {
                !self.aut.is_deterministic(q) && k < self.aut.epsilon_successors(q).len()
            }),
        }
    }

    fn leave(&self, x: &ProductState) -> SetMask {
        match x.q {
            Some(q) => frontier_mask_update(
                self.aut.membership(q),
                self.aut.full_mask(),
                x.frontier,
                self.mode,
            ),
            None => 0,
        }
    }

    fn arrive(&self, x: &ProductState, t: SetMask, s: StateId, l: Letter) -> ProductState {
        match x.q.and_then(|q| self.read(q, l)) {
            Some(q) => ProductState {
                s,
                l,
                q: Some(q),
                frontier: t,
            },
            None => ProductState {
                s,
                l,
                q: None,
                frontier: 0,
            },
        }
    }

    fn unavailable(&self, x: &ProductState, u: ProductAction) -> Error {
        Error::UnavailableAction {
            state: self.encode(x),
            action: self.action_name(x, u),
        }
    }

    /// Exact successor distribution of `(x, u)`, ordered by `(s', l')`.
    pub fn successors(
        &self,
        x: &ProductState,
        u: ProductAction,
    ) -> Result<Vec<(ProductState, f64)>> {
        if !self.is_available(x, u) {
            return Err(self.unavailable(x, u));
        }
        let t = self.leave(x);
        Ok(match u {
            ProductAction::Mdp(a) => {
                let mut out = Vec::new();
                for &(s2, ps) in self.mdp.successors(x.s, a) {
                    for &(l2, pl) in self.mdp.labels(s2) {
                        if ps * pl > 0.0 {
                            out.push((self.arrive(x, t, s2, l2), ps * pl));
                        }
                    }
                }
                out
            }
            ProductAction::Epsilon(k) => {
                let q = self.aut.epsilon_successors(x.q.unwrap())[k];
                vec![(
                    ProductState {
                        s: x.s,
                        l: x.l,
                        q: Some(q),
                        frontier: t,
                    },
                    1.0,
                )]
            }
        })
    }

    pub fn sample_next<R: Rng + ?Sized>(
        &self,
        x: &ProductState,
        u: ProductAction,
        rng: &mut R,
    ) -> Result<ProductState> {
        if !self.is_available(x, u) {
            return Err(self.unavailable(x, u));
        }
        let t = self.leave(x);
        Ok(match u {
            ProductAction::Mdp(a) => {
                let s2 = sample(self.mdp.successors(x.s, a), rng);
                let l2 = self.mdp.sample_label(s2, rng);
                self.arrive(x, t, s2, l2)
            }
            ProductAction::Epsilon(k) => {
                let q = self.aut.epsilon_successors(x.q.unwrap())[k];
                ProductState {
                    s: x.s,
                    l: x.l,
                    q: Some(q),
                    frontier: t,
                }
            }
        })
    }

    /// Samples one product transition; reward and discount belong to `x`.
    pub fn product_step<R: Rng + ?Sized>(
        &self,
        x: &ProductState,
        u: ProductAction,
        cfg: &RewardConfig,
        rng: &mut R,
    ) -> Result<StepOutcome> {
        let next = self.sample_next(x, u, rng)?;
        let flags = self.flags(x);
        Ok(StepOutcome {
            next,
            reward: cfg.reward(flags != 0),
            discount: cfg.discount(flags != 0),
            flags,
        })
    }

    pub fn action_name(&self, x: &ProductState, u: ProductAction) -> String {
        match u {
            ProductAction::Mdp(a) => self
                .mdp
                .action_names()
                .get(a)
                .cloned()
                .unwrap_or_else(|| format!("#{a}")),
            ProductAction::Epsilon(k) => {
                match x.q.and_then(|q| self.aut.epsilon_successors(q).get(k)) {
                    Some(&t) => format!("eps:{}", self.aut.state_name(t)),
                    None => format!("eps:#{k}"),
                }
            }
        }
    }

    /// Canonical text form `state|{label}|q|{frontier}` with one-based
    /// frontier indices; the dead component prints `q` as `-`.
    pub fn encode(&self, x: &ProductState) -> String {
        let q = x.q.map_or("-", |q| self.aut.state_name(q));
        format!(
            "{}|{}|{}|{}",
            self.mdp.state_name(x.s),
            self.mdp.props().display(x.l),
            q,
            MaskDisplay(x.frontier)
        )
    }
}

fn hopeless_states(a: &Ldgba) -> Vec<bool> {
    let n = a.num_states();
    let mut preds: Vec<Vec<AutState>> = vec![Vec::new(); n];
    for q in 0..n {
        for l in a.props().letters() {
            for &t in a.successors(q, l) {
                preds[t].push(q);
            }
        }
        for &t in a.epsilon_successors(q) {
            preds[t].push(q);
        }
    }
    let mut hopeful = vec![false; n];
    let mut stack: Vec<AutState> = (0..n).filter(|&q| a.membership(q) != 0).collect();
    for &q in &stack {
        hopeful[q] = true;
    }
    while let Some(q) = stack.pop() {
        for &p in &preds[q] {
            if !hopeful[p] {
                hopeful[p] = true;
                stack.push(p);
            }
        }
    }
    hopeful.into_iter().map(|h| !h).collect()
}

/// One-based set notation for a mask.
pub struct MaskDisplay(pub SetMask);

impl fmt::Display for MaskDisplay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = (0..64)
            .filter(|j| self.0 & (1 << j) != 0)
            .map(|j| (j + 1).to_string())
            .collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// The reachable part of a product, numbered in breadth-first order.
#[derive(Clone, Debug)]
pub struct ExplicitProduct {
    pub states: Vec<ProductState>,
    pub index: HashMap<ProductState, usize>,
    /// `actions[x]` in ascending [`ProductAction`] order.
    pub actions: Vec<Vec<ProductAction>>,
    /// `transitions[x][k]` is the distribution of `actions[x][k]`.
    pub transitions: Vec<Vec<Vec<(usize, f64)>>>,
    /// Accepting-set mask per state.
    pub accepting: Vec<SetMask>,
    pub num_sets: usize,
    /// Indices of the exploration roots; `roots[0]` is the initial state.
    pub roots: Vec<usize>,
}

impl ExplicitProduct {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial(&self) -> usize {
        self.roots[0]
    }

    pub fn full_mask(&self) -> SetMask {
        crate::automata::full_mask(self.num_sets)
    }

    /// `F_j^P` with one-based `j`.
    pub fn accepting_set(&self, j: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| self.accepting[x] & (1 << (j - 1)) != 0)
            .collect()
    }

    pub fn action_position(&self, x: usize, u: ProductAction) -> Option<usize> {
        self.actions[x].binary_search(&u).ok()
    }
}

/// Breadth-first closure from the product's initial state.
pub fn enumerate_product(p: &Product<'_>, cap: usize) -> Result<ExplicitProduct> {
    enumerate_from(p, &[p.initial_state()], cap)
}

/// Breadth-first closure from `roots`, actions expanded in ascending order.
pub fn enumerate_from(
    p: &Product<'_>,
    roots: &[ProductState],
    cap: usize,
) -> Result<ExplicitProduct> {
    let mut ep = ExplicitProduct {
        states: Vec::new(),
        index: HashMap::new(),
        actions: Vec::new(),
        transitions: Vec::new(),
        accepting: Vec::new(),
        num_sets: p.num_sets(),
        roots: Vec::new(),
    };
    let mut queue = VecDeque::new();
    let intern =
        |ep: &mut ExplicitProduct, queue: &mut VecDeque<usize>, x: ProductState| -> Result<usize> {
            if let Some(&i) = ep.index.get(&x) {
                return Ok(i);
            }
            if ep.states.len() >= cap {
                return Err(Error::BudgetExceeded {
                    cap,
                    frontier: queue.len() + 1,
                });
            }
            let i = ep.states.len();
            ep.states.push(x);
            ep.index.insert(x, i);
            queue.push_back(i);
            Ok(i)
        };
    for &r in roots {
        let i = intern(&mut ep, &mut queue, r)?;
        ep.roots.push(i);
    }
    while let Some(i) = queue.pop_front() {
        let x = ep.states[i];
        let actions = p.available_actions(&x);
        let mut rows = Vec::with_capacity(actions.len());
        for &u in &actions {
            let mut row = Vec::new();
            for (y, prob) in p.successors(&x, u)? {
                let j = intern(&mut ep, &mut queue, y)?;
                row.push((j, prob));
            }
            rows.push(row);
        }
        debug_assert_eq!(ep.actions.len(), i);
        ep.actions.push(actions);
        ep.transitions.push(rows);
    }
    ep.accepting = ep.states.iter().map(|x| p.flags(x)).collect();
    Ok(ep)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductDocument {
    pub states: Vec<String>,
    pub initial: usize,
    pub transitions: Vec<ProductTransitionDoc>,
    /// `accepting[j]` lists the state indices of `F_{j+1}^P`.
    pub accepting: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductTransitionDoc {
    pub from: usize,
    pub action: String,
    pub to: usize,
    pub p: f64,
}

pub fn export_product(p: &Product<'_>, ep: &ExplicitProduct) -> ProductDocument {
    let mut transitions = Vec::new();
    for x in 0..ep.len() {
        for (k, &u) in ep.actions[x].iter().enumerate() {
            for &(y, prob) in &ep.transitions[x][k] {
                transitions.push(ProductTransitionDoc {
                    from: x,
                    action: p.action_name(&ep.states[x], u),
                    to: y,
                    p: prob,
                });
            }
        }
    }
    ProductDocument {
        states: ep.states.iter().map(|x| p.encode(x)).collect(),
        initial: ep.initial(),
        transitions,
        accepting: (1..=ep.num_sets).map(|j| ep.accepting_set(j)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{builtin_automaton, LdgbaBuilder};
    use crate::models;
    use crate::props::PropSet;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn example_initial_state() {
        let m = models::example_mdp();
        let a = builtin_automaton("phi_e").unwrap();
        let p = Product::new(&m, &a, ResetMode::Immediate);
        let x0 = p.initial_state();
        assert_eq!(
            x0,
            ProductState {
                s: 0,
                l: Letter(1),
                q: Some(0),
                frontier: 0b11
            }
        );
        assert_eq!(p.encode(&x0), "s0|{r0}|q0|{1,2}");
        assert_eq!(
            p.available_actions(&x0),
            vec![ProductAction::Mdp(0), ProductAction::Mdp(1)]
        );
    }

    #[test]
    fn example_a01_step() {
        let m = models::example_mdp();
        let a = builtin_automaton("phi_e").unwrap();
        let p = Product::new(&m, &a, ResetMode::Immediate);
        let x0 = p.initial_state();
        let succ = p.successors(&x0, ProductAction::Mdp(0)).unwrap();
        let x1 = ProductState {
            s: 1,
            l: Letter(2),
            q: Some(1),
            frontier: 0b11,
        };
        assert_eq!(succ, vec![(x1, 1.0)]);
        assert_eq!(p.flags(&x1), 0b01);
        // Leaving x1 credits F_1.
        let succ = p.successors(&x1, ProductAction::Mdp(3)).unwrap();
        assert_eq!(succ[0].0.frontier, 0b10);
        assert_eq!(p.flags(&succ[0].0), 0);
    }

    #[test]
    fn grid_start_and_two_label_cell() {
        let g = crate::mdp::GridSpec {
            width: 3,
            height: 3,
            slip: 0.1,
            initial_cell: [0, 0],
            cells: vec![
                crate::mdp::CellLabel {
                    at: [0, 1],
                    label: vec!["t".into()],
                    p: 0.9,
                },
                crate::mdp::CellLabel {
                    at: [0, 1],
                    label: vec![],
                    p: 0.1,
                },
            ],
            props: Some(vec!["t".into(), "u".into()]),
            initial_label: None,
        };
        let m = crate::mdp::build_grid_env(&g).unwrap();
        let a = builtin_automaton("phi_case1").unwrap();
        let p = Product::new(&m, &a, ResetMode::Immediate);
        let x0 = p.initial_state();
        assert_eq!(
            (x0.s, x0.l, x0.q, x0.frontier),
            (0, Letter::EMPTY, Some(0), 1)
        );
        // From (1,1) go north: (0,1) w.p. 0.9, (1,2) and (1,0) w.p. 0.05 each.
        let x = p.start_state(4, Letter::EMPTY);
        let succ = p.successors(&x, ProductAction::Mdp(0)).unwrap();
        assert_eq!(succ.len(), 4);
        let total: f64 = succ.iter().map(|(_, q)| q).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let t_cell = succ
            .iter()
            .find(|(y, _)| y.s == 1 && y.l == Letter(1))
            .unwrap();
        assert!((t_cell.1 - 0.81).abs() < 1e-12);
    }

    #[test]
    fn epsilon_actions_follow_q_n() {
        let props = PropSet::new(["a"]).unwrap();
        let mut b = LdgbaBuilder::new(props, vec!["n".into(), "d1".into(), "d2".into()]);
        b.nondeterministic(0)
            .edges_where(0, 0, |_| true)
            .epsilon(0, 1)
            .epsilon(0, 2);
        b.edges_where(1, 1, |_| true)
            .edges_where(2, 2, |_| true)
            .accepting_set(vec![1]);
        let a = b.build();
        let m = models::example_mdp();
        let p = Product::new(&m, &a, ResetMode::Immediate);
        let x0 = p.initial_state();
        let acts = p.available_actions(&x0);
        assert_eq!(acts.len(), 4);
        assert_eq!(
            &acts[2..],
            &[ProductAction::Epsilon(0), ProductAction::Epsilon(1)]
        );
        let succ = p.successors(&x0, ProductAction::Epsilon(1)).unwrap();
        assert_eq!(succ.len(), 1);
        assert_eq!(
            (succ[0].0.s, succ[0].0.l, succ[0].0.q),
            (x0.s, x0.l, Some(2))
        );
    }

    #[test]
    fn enumeration_of_example() {
        let m = models::example_mdp();
        let a = builtin_automaton("phi_e").unwrap();
        let p = Product::new(&m, &a, ResetMode::Immediate);
        let ep = enumerate_product(&p, 1000).unwrap();
        assert!(ep.len() >= 5);
        for x in 0..ep.len() {
            for row in &ep.transitions[x] {
                let s: f64 = row.iter().map(|r| r.1).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
            assert_ne!(ep.states[x].frontier, 0);
        }
        assert!(matches!(
            enumerate_product(&p, 2),
            Err(Error::BudgetExceeded { cap: 2, .. })
        ));
    }

    #[test]
    fn unsafe_letter_enters_dead_component() {
        let m = models::case1_grid();
        let a = builtin_automaton("phi_case1").unwrap();
        let p = Product::new(&m, &a, ResetMode::Immediate);
        let x = p.start_state(9, Letter::EMPTY); // (2,1)
        let succ = p.successors(&x, ProductAction::Mdp(3)).unwrap(); // W into u
        let into_u = succ.iter().find(|(y, _)| y.s == 8).unwrap();
        assert_eq!(into_u.0.q, Some(2));
        assert!(!p.is_accepting(&into_u.0));
    }

    #[test]
    fn sampled_step_respects_availability() {
        let m = models::example_mdp();
        let a = builtin_automaton("phi_e").unwrap();
        let p = Product::new(&m, &a, ResetMode::Immediate);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x0 = p.initial_state();
        assert!(p
            .product_step(
                &x0,
                ProductAction::Mdp(2),
                &RewardConfig::default(),
                &mut rng
            )
            .is_err());
        let out = p
            .product_step(
                &x0,
                ProductAction::Mdp(1),
                &RewardConfig::default(),
                &mut rng,
            )
            .unwrap();
        assert_eq!(out.next.q, Some(2));
        assert_eq!(out.reward, 0.0);
    }
}
