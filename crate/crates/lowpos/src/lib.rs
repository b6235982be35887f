//! Weakly supervised cross-lingual POS tagging toolkit: dictionary-driven
//! silver annotation (FREQ and AMB), a hierarchical char/word bi-LSTM
//! tagger with a character autoencoding auxiliary task, reference
//! baselines, and a seeded multi-run experiment harness.

pub mod baselines;
pub mod clean;
pub mod corpus;
pub mod dict;
pub mod error;
pub mod harness;
pub mod neural;
pub mod silver;
pub mod synth;
pub mod tags;
pub mod vocab;

pub use error::{Error, Result};
