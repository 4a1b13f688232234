//! JSON form of a PL-MDP.

use serde::{Deserialize, Serialize};

use super::{validate_plmdp, PlMdp, PlMdpBuilder};
use crate::error::{Error, Result};
use crate::props::PropSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlMdpDocument {
    pub states: Vec<String>,
    /// Optional in input; when present, every transition's action must be
    /// listed. Always written on output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actions: Option<Vec<String>>,
    pub atomic_props: Vec<String>,
    pub initial: InitialDoc,
    pub transitions: Vec<TransitionDoc>,
    pub labels: Vec<LabelDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDoc {
    pub state: String,
    pub label: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub action: String,
    pub to: String,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelDoc {
    pub state: String,
    pub label: Vec<String>,
    pub p: f64,
}

fn lookup(names: &[String], name: &str, path: String) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::schema(path, format!("unknown name `{name}`")))
}

/// Parses and validates a PL-MDP document.
pub fn load_plmdp(doc: &PlMdpDocument) -> Result<PlMdp> {
    for (i, s) in doc.states.iter().enumerate() {
        if doc.states[..i].contains(s) {
            return Err(Error::schema(
                format!("states[{i}]"),
                format!("duplicate state `{s}`"),
            ));
        }
    }
    let props = PropSet::new(doc.atomic_props.iter().cloned())?;
    let declared = doc.actions.is_some();
    let mut actions: Vec<String> = doc.actions.clone().unwrap_or_default();
    if !declared {
        for t in &doc.transitions {
            if !actions.contains(&t.action) {
                actions.push(t.action.clone());
            }
        }
    }
    let mut b = PlMdpBuilder::new(doc.states.clone(), actions.clone(), props.clone());
    let mut seen = std::collections::HashSet::new();
    for (i, t) in doc.transitions.iter().enumerate() {
        let from = lookup(&doc.states, &t.from, format!("transitions[{i}].from"))?;
        let action = lookup(&actions, &t.action, format!("transitions[{i}].action"))?;
        let to = lookup(&doc.states, &t.to, format!("transitions[{i}].to"))?;
        if !seen.insert((from, action, to)) {
            return Err(Error::schema(
                format!("transitions[{i}]"),
                "duplicate (from, action, to) entry",
            ));
        }
        b.transition(from, action, to, t.p);
    }
    let mut seen = std::collections::HashSet::new();
    for (i, l) in doc.labels.iter().enumerate() {
        let s = lookup(&doc.states, &l.state, format!("labels[{i}].state"))?;
        let letter = props.letter(&l.label, &format!("labels[{i}].label"))?;
        if !seen.insert((s, letter)) {
            return Err(Error::schema(
                format!("labels[{i}]"),
                "duplicate (state, label) entry",
            ));
        }
        b.label(s, letter, l.p);
    }
    let s0 = lookup(&doc.states, &doc.initial.state, "initial.state".into())?;
    let l0 = props.letter(&doc.initial.label, "initial.label")?;
    b.initial(s0, l0);
    let m = b.build();
    validate_plmdp(&m).into_result()?;
    Ok(m)
}

pub fn store_plmdp(m: &PlMdp) -> PlMdpDocument {
    let mut transitions = Vec::new();
    let mut labels = Vec::new();
    for s in 0..m.num_states() {
        for &a in m.available(s) {
            for &(t, p) in m.successors(s, a) {
                transitions.push(TransitionDoc {
                    from: m.state_name(s).to_owned(),
                    action: m.action_name(a).to_owned(),
                    to: m.state_name(t).to_owned(),
                    p,
                });
            }
        }
        for &(l, p) in m.labels(s) {
            labels.push(LabelDoc {
                state: m.state_name(s).to_owned(),
                label: m.props().names_of(l),
                p,
            });
        }
    }
    let (s0, l0) = m.initial();
    PlMdpDocument {
        states: m.state_names().to_vec(),
        actions: Some(m.action_names().to_vec()),
        atomic_props: m.props().names().to_vec(),
        initial: InitialDoc {
            state: m.state_name(s0).to_owned(),
            label: m.props().names_of(l0),
        },
        transitions,
        labels,
    }
}
