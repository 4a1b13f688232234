//! Policy synthesis for LTL tasks on probabilistic labeled MDPs.
//!
//! The pipeline is: a [`mdp::PlMdp`] and an [`automata::Ldgba`] are combined
//! into the embedded product of [`product`], whose frontier component comes
//! from [`embedding`]. [`learning`] runs tabular Q-learning on sampled
//! product steps using the shaped signal of [`reward`]. [`oracle`] solves the
//! enumerated product exactly and is used to check what was learned.

pub mod automata;
pub mod embedding;
pub mod error;
pub mod learning;
pub mod mdp;
pub mod models;
pub mod oracle;
pub mod product;
pub mod props;
pub mod reward;

pub use error::{Error, Result};
