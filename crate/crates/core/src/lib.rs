//! A finite-model-theory workbench.
//!
//! Evaluates first-order logic extended with counting, Härtig, Rescher,
//! well-ordering and class-oracle quantifiers over finite relational
//! structures; checks permutation invariance of operations on semantic values;
//! synthesizes characterizing sentences; computes finite spectra; and checks
//! Hilbert-style proofs in Keisler's system for "there exist many".

pub mod definability;
pub mod error;
pub mod evaluator;
pub mod operations;
pub mod proofs;
pub mod spectra;
pub mod structures;
pub mod syntax;

pub use error::{Error, Result};
