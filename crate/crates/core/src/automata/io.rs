//! JSON form of an automaton.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{validate_ldgba, Ldgba, LdgbaBuilder};
use crate::error::{Error, Result};
use crate::props::{Letter, PropSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDocument {
    pub props: Vec<String>,
    pub states: Vec<String>,
    pub initial: String,
    pub q_d: Vec<String>,
    pub q_n: Vec<String>,
    pub transitions: Vec<TransitionDoc>,
    #[serde(default)]
    pub epsilon: Vec<EpsilonDoc>,
    pub accepting: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub letters: LettersDoc,
    pub to: String,
}

/// Either the literal string `"any"` or an explicit list of letters.
#[derive(Clone, Debug, PartialEq)]
pub enum LettersDoc {
    Any,
    List(Vec<Vec<String>>),
}

impl Serialize for LettersDoc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            LettersDoc::Any => s.serialize_str("any"),
            LettersDoc::List(l) => l.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for LettersDoc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Word(String),
            List(Vec<Vec<String>>),
        }
        match Raw::deserialize(d)? {
            Raw::Word(w) if w == "any" => Ok(LettersDoc::Any),
            Raw::Word(w) => Err(serde::de::Error::custom(format!(
                "expected \"any\" or a list of letters, got \"{w}\""
            ))),
            Raw::List(l) => Ok(LettersDoc::List(l)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonDoc {
    pub from: String,
    pub to: String,
}

fn lookup(names: &[String], name: &str, path: String) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::schema(path, format!("unknown state `{name}`")))
}

/// Parses a document and refuses automata violating the LDGBA conditions.
pub fn load_automaton(doc: &AutomatonDocument) -> Result<Ldgba> {
    let props = PropSet::new(doc.props.iter().cloned())?;
    for (i, s) in doc.states.iter().enumerate() {
        if doc.states[..i].contains(s) {
            return Err(Error::schema(
                format!("states[{i}]"),
                format!("duplicate state `{s}`"),
            ));
        }
    }
    let n = doc.states.len();
    let mut in_d = vec![false; n];
    let mut in_n = vec![false; n];
    for (i, s) in doc.q_d.iter().enumerate() {
        in_d[lookup(&doc.states, s, format!("q_d[{i}]"))?] = true;
    }
    for (i, s) in doc.q_n.iter().enumerate() {
        in_n[lookup(&doc.states, s, format!("q_n[{i}]"))?] = true;
    }
    for q in 0..n {
        match (in_d[q], in_n[q]) {
            (true, true) => {
                return Err(Error::schema(
                    "q_n",
                    format!("`{}` is in both Q_D and Q_N", doc.states[q]),
                ))
            }
            (false, false) => {
                return Err(Error::schema(
                    "q_d",
                    format!("`{}` is in neither Q_D nor Q_N", doc.states[q]),
                ))
            }
            _ => {}
        }
    }
    let mut b = LdgbaBuilder::new(props.clone(), doc.states.clone());
    b.initial(lookup(&doc.states, &doc.initial, "initial".into())?);
    for q in (0..n).filter(|&q| in_n[q]) {
        b.nondeterministic(q);
    }
    for (i, t) in doc.transitions.iter().enumerate() {
        let from = lookup(&doc.states, &t.from, format!("transitions[{i}].from"))?;
        let to = lookup(&doc.states, &t.to, format!("transitions[{i}].to"))?;
        match &t.letters {
            LettersDoc::Any => {
                b.edges_where(from, to, |_| true);
            }
            LettersDoc::List(list) => {
                for (k, l) in list.iter().enumerate() {
                    let letter = props.letter(l, &format!("transitions[{i}].letters[{k}]"))?;
                    b.edge(from, letter, to);
                }
            }
        }
    }
    for (i, e) in doc.epsilon.iter().enumerate() {
        let from = lookup(&doc.states, &e.from, format!("epsilon[{i}].from"))?;
        let to = lookup(&doc.states, &e.to, format!("epsilon[{i}].to"))?;
        b.epsilon(from, to);
    }
    for (j, set) in doc.accepting.iter().enumerate() {
        let mut ids = Vec::with_capacity(set.len());
        for (k, s) in set.iter().enumerate() {
            ids.push(lookup(&doc.states, s, format!("accepting[{j}][{k}]"))?);
        }
        b.accepting_set(ids);
    }
    let a = b.build();
    validate_ldgba(&a).into_result()?;
    Ok(a)
}

/// Writes one transition entry per `(from, to)` pair, in first-use order,
/// using `"any"` when the pair covers the whole alphabet.
pub fn store_automaton(a: &Ldgba) -> AutomatonDocument {
    let props = a.props();
    let names = |q: usize| a.state_name(q).to_owned();
    let mut transitions = Vec::new();
    for q in 0..a.num_states() {
        let mut by_target: BTreeMap<usize, Vec<Letter>> = BTreeMap::new();
        for l in props.letters() {
            for &t in a.successors(q, l) {
                by_target.entry(t).or_default().push(l);
            }
        }
        for (t, letters) in by_target {
            let letters = if letters.len() == props.alphabet_size() {
                LettersDoc::Any
            } else {
                LettersDoc::List(letters.into_iter().map(|l| props.names_of(l)).collect())
            };
            transitions.push(TransitionDoc {
                from: names(q),
                letters,
                to: names(t),
            });
        }
    }
    let epsilon = (0..a.num_states())
        .flat_map(|q| a.epsilon_successors(q).iter().map(move |&t| (q, t)))
        .map(|(q, t)| EpsilonDoc {
            from: names(q),
            to: names(t),
        })
        .collect();
    AutomatonDocument {
        props: props.names().to_vec(),
        states: a.state_names().to_vec(),
        initial: names(a.initial()),
        q_d: (0..a.num_states())
            .filter(|&q| a.is_deterministic(q))
            .map(names)
            .collect(),
        q_n: (0..a.num_states())
            .filter(|&q| !a.is_deterministic(q))
            .map(names)
            .collect(),
        transitions,
        epsilon,
        accepting: a
            .accepting_sets()
            .iter()
            .map(|s| s.iter().map(|&q| names(q)).collect())
            .collect(),
    }
}
