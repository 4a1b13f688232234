//! Slip gridworlds.
//!
//! Cell `(r, c)` is state `r * width + c` and is named `r{r}_c{c}`. Row 0 is
//! the northern edge.

use serde::{Deserialize, Serialize};

use super::{validate_plmdp, PlMdp, PlMdpBuilder, PROBABILITY_TOLERANCE};
use crate::error::{Error, Result};
use crate::props::{Letter, PropSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    North,
    South,
    East,
    West,
    Rest,
}

impl Direction {
    fn delta(self) -> (isize, isize) {
        match self {
            Direction::North => (-1, 0),
            Direction::South => (1, 0),
            Direction::East => (0, 1),
            Direction::West => (0, -1),
            Direction::Rest => (0, 0),
        }
    }

    fn lateral(self) -> [Direction; 2] {
        match self {
            Direction::North | Direction::South => [Direction::East, Direction::West],
            Direction::East | Direction::West => [Direction::North, Direction::South],
            Direction::Rest => [Direction::Rest, Direction::Rest],
        }
    }
}

/// Action names in action-index order.
pub const GRID_ACTIONS: [(&str, Direction); 5] = [
    ("N", Direction::North),
    ("S", Direction::South),
    ("E", Direction::East),
    ("W", Direction::West),
    ("R", Direction::Rest),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellLabel {
    pub at: [usize; 2],
    pub label: Vec<String>,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub slip: f64,
    pub initial_cell: [usize; 2],
    #[serde(default)]
    pub cells: Vec<CellLabel>,
    /// Proposition order; defaults to the sorted set of names used in `cells`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub props: Option<Vec<String>>,
    /// Defaults to the first label listed for the initial cell, or `∅`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_label: Option<Vec<String>>,
}

pub fn cell_name(r: usize, c: usize) -> String {
    format!("r{r}_c{c}")
}

/// Inverse of the state naming scheme.
pub fn cell_of_state_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix('r')?;
    let (r, c) = rest.split_once("_c")?;
    Some((r.parse().ok()?, c.parse().ok()?))
}

pub fn build_grid_env(g: &GridSpec) -> Result<PlMdp> {
    let [r0, c0] = g.initial_cell;
    if r0 >= g.height || c0 >= g.width {
        return Err(Error::InitialCellOutOfBounds {
            row: r0,
            col: c0,
            height: g.height,
            width: g.width,
        });
    }
    if !(0.0..1.0).contains(&g.slip) {
        return Err(Error::schema(
            "slip",
            format!("slip {} outside [0, 1)", g.slip),
        ));
    }
    let props = match &g.props {
        Some(p) => PropSet::new(p.iter().cloned())?,
        None => {
            let mut names: Vec<String> = g
                .cells
                .iter()
                .flat_map(|c| c.label.iter().cloned())
                .collect();
            names.sort();
            names.dedup();
            PropSet::new(names)?
        }
    };
    let n = g.width * g.height;
    let idx = |r: usize, c: usize| r * g.width + c;
    let mut states = Vec::with_capacity(n);
    for r in 0..g.height {
        for c in 0..g.width {
            states.push(cell_name(r, c));
        }
    }
    let actions = GRID_ACTIONS.iter().map(|(a, _)| a.to_string()).collect();
    let mut b = PlMdpBuilder::new(states, actions, props.clone());

    let step = |r: usize, c: usize, d: Direction| -> usize {
        let (dr, dc) = d.delta();
        let nr = r as isize + dr;
        let nc = c as isize + dc;
        if nr < 0 || nc < 0 || nr >= g.height as isize || nc >= g.width as isize {
            idx(r, c)
        } else {
            idx(nr as usize, nc as usize)
        }
    };
    for r in 0..g.height {
        for c in 0..g.width {
            let s = idx(r, c);
            for (a, &(_, d)) in GRID_ACTIONS.iter().enumerate() {
                if d == Direction::Rest {
                    b.transition(s, a, s, 1.0);
                    continue;
                }
                b.transition(s, a, step(r, c, d), 1.0 - g.slip);
                if g.slip > 0.0 {
                    for side in d.lateral() {
                        b.transition(s, a, step(r, c, side), g.slip / 2.0);
                    }
                }
            }
        }
    }

    let mut listed = vec![false; n];
    let mut first_label: Vec<Option<Letter>> = vec![None; n];
    for (i, cell) in g.cells.iter().enumerate() {
        let [r, c] = cell.at;
        if r >= g.height || c >= g.width {
            return Err(Error::schema(
                format!("cells[{i}].at"),
                format!("cell ({r}, {c}) outside the grid"),
            ));
        }
        let l = props.letter(&cell.label, &format!("cells[{i}].label"))?;
        let s = idx(r, c);
        listed[s] = true;
        first_label[s].get_or_insert(l);
        b.label(s, l, cell.p);
    }
    for (s, &l) in listed.iter().enumerate() {
        if !l {
            b.label(s, Letter::EMPTY, 1.0);
        }
    }
    let l0 = match &g.initial_label {
        Some(names) => props.letter(names, "initial_label")?,
        None => first_label[idx(r0, c0)].unwrap_or(Letter::EMPTY),
    };
    b.initial(idx(r0, c0), l0);
    let m = b.build();
    for s in 0..n {
        let sum: f64 = m.labels(s).iter().map(|&(_, p)| p).sum();
        if (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::schema(
                "cells",
                format!("label probabilities of `{}` sum to {sum}", m.state_name(s)),
            ));
        }
    }
    validate_plmdp(&m).into_result()?;
    Ok(m)
}
