#![allow(dead_code)]

use ltlrl::automata::Lasso;
use ltlrl::props::Letter;
use proptest::prelude::*;

/// LTL over proposition indices, evaluated directly on folded lassos.
#[derive(Clone, Debug)]
pub enum Ltl {
    True,
    Prop(usize),
    Not(Box<Ltl>),
    And(Vec<Ltl>),
    Or(Vec<Ltl>),
    Next(Box<Ltl>),
    Until(Box<Ltl>, Box<Ltl>),
}

pub fn prop(i: usize) -> Ltl {
    Ltl::Prop(i)
}

pub fn not(f: Ltl) -> Ltl {
    Ltl::Not(Box::new(f))
}

pub fn next(f: Ltl) -> Ltl {
    Ltl::Next(Box::new(f))
}

pub fn until(a: Ltl, b: Ltl) -> Ltl {
    Ltl::Until(Box::new(a), Box::new(b))
}

pub fn eventually(f: Ltl) -> Ltl {
    until(Ltl::True, f)
}

pub fn always(f: Ltl) -> Ltl {
    not(eventually(not(f)))
}

pub fn implies(a: Ltl, b: Ltl) -> Ltl {
    Ltl::Or(vec![not(a), b])
}

/// Truth value at every folded position `0..w.len()`.
pub fn truth(f: &Ltl, w: &Lasso) -> Vec<bool> {
    let n = w.len();
    match f {
        Ltl::True => vec![true; n],
        Ltl::Prop(i) => (0..n).map(|p| w.at(p).contains(*i)).collect(),
        Ltl::Not(g) => truth(g, w).into_iter().map(|b| !b).collect(),
        Ltl::And(gs) => gs.iter().fold(vec![true; n], |acc, g| {
            acc.iter().zip(truth(g, w)).map(|(a, b)| *a && b).collect()
        }),
        Ltl::Or(gs) => gs.iter().fold(vec![false; n], |acc, g| {
            acc.iter().zip(truth(g, w)).map(|(a, b)| *a || b).collect()
        }),
        Ltl::Next(g) => {
            let t = truth(g, w);
            (0..n).map(|p| t[w.next_position(p)]).collect()
        }
        Ltl::Until(a, b) => {
            let ta = truth(a, w);
            let tb = truth(b, w);
            let mut x = vec![false; n];
            loop {
                let y: Vec<bool> = (0..n)
                    .map(|p| tb[p] || (ta[p] && x[w.next_position(p)]))
                    .collect();
                if y == x {
                    return x;
                }
                x = y;
            }
        }
    }
}

pub fn holds(f: &Ltl, w: &Lasso) -> bool {
    truth(f, w)[0]
}

/// Lassos over `alphabet` letters with short prefix and cycle.
pub fn lasso(alphabet: u32, max_prefix: usize, max_cycle: usize) -> impl Strategy<Value = Lasso> {
    let letter = (0..alphabet).prop_map(Letter);
    (
        prop::collection::vec(letter.clone(), 0..=max_prefix),
        prop::collection::vec(letter, 1..=max_cycle),
    )
        .prop_map(|(p, c)| Lasso::new(p, c))
}

/// Lassos drawn from an explicit letter list.
pub fn lasso_over(
    letters: Vec<Letter>,
    max_prefix: usize,
    max_cycle: usize,
) -> impl Strategy<Value = Lasso> {
    let letter = prop::sample::select(letters);
    (
        prop::collection::vec(letter.clone(), 0..=max_prefix),
        prop::collection::vec(letter, 1..=max_cycle),
    )
        .prop_map(|(p, c)| Lasso::new(p, c))
}
