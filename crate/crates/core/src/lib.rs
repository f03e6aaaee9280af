//! Stance detection from tweet text and social-network signals.
//!
//! This crate holds the allocation-only algorithmic core: tokenization and
//! boolean n-gram features, network feature families, a dual coordinate
//! descent linear SVM with one-vs-rest and polarized (favor/against) modes,
//! the SemEval favor/against macro-F scorer, significance tests, overlap and
//! weight analyses, and a seeded synthetic corpus generator.
//!
//! File formats, model bundles and the command line live in the `stance`
//! crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod features;
pub mod label;
pub mod stats;
pub mod svm;
pub mod synth;

pub use crate::error::{Error, Result};
pub use crate::label::StanceLabel;
