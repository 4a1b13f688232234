//! Atomic propositions and letters over them.
//!
//! A [`Letter`] is an element of `2^Π`, stored as a bitmask whose bit `i`
//! is set when proposition `i` of the owning [`PropSet`] holds.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Upper bound on the number of propositions an alphabet may carry.
///
/// Automata store one successor list per letter, so the alphabet size
/// `2^|Π|` has to stay small.
pub const MAX_PROPS: usize = 16;

#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Letter(pub u32);

impl Letter {
    pub const EMPTY: Letter = Letter(0);

    pub fn contains(self, prop: usize) -> bool {
        self.0 & (1 << prop) != 0
    }

    pub fn with(self, prop: usize) -> Letter {
        Letter(self.0 | (1 << prop))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn props(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }
}

/// An ordered, named set of atomic propositions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropSet {
    names: Vec<String>,
}

impl PropSet {
    pub fn new<I, S>(names: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_PROPS {
            return Err(Error::schema(
                "props",
                format!(
                    "{} propositions exceed the limit of {MAX_PROPS}",
                    names.len()
                ),
            ));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::schema(
                    "props",
                    format!("duplicate proposition `{n}`"),
                ));
            }
        }
        Ok(PropSet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Number of letters in `2^Π`.
    pub fn alphabet_size(&self) -> usize {
        1 << self.names.len()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.alphabet_size() as u32).map(Letter)
    }

    /// Parses a list of proposition names; `field` names the document
    /// location for error messages.
    pub fn letter<S: AsRef<str>>(&self, props: &[S], field: &str) -> Result<Letter, Error> {
        let mut letter = Letter::EMPTY;
        for p in props {
            let p = p.as_ref();
            let i = self
                .index_of(p)
                .ok_or_else(|| Error::schema(field, format!("unknown proposition `{p}`")))?;
            letter = letter.with(i);
        }
        Ok(letter)
    }

    /// Canonical form of a letter: proposition names sorted.
    pub fn names_of(&self, letter: Letter) -> Vec<String> {
        let mut out: Vec<String> = letter
            .props()
            .filter(|&i| i < self.names.len())
            .map(|i| self.names[i].clone())
            .collect();
        out.sort();
        out
    }

    /// Projects a letter over `self` onto `target`, dropping propositions
    /// `target` does not know.
    pub fn project(&self, letter: Letter, target: &PropSet) -> Letter {
        let mut out = Letter::EMPTY;
        for i in letter.props() {
            if let Some(name) = self.names.get(i) {
                if let Some(j) = target.index_of(name) {
                    out = out.with(j);
                }
            }
        }
        out
    }

    pub fn display(&self, letter: Letter) -> LetterDisplay<'_> {
        LetterDisplay {
            props: self,
            letter,
        }
    }
}

pub struct LetterDisplay<'a> {
    props: &'a PropSet,
    letter: Letter,
}

impl fmt::Display for LetterDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.props.names_of(self.letter).join(","))
    }
}
