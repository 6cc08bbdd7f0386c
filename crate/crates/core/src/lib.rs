//! Temporal reasoning over finite-domain constraints.
//!
//! LTLf specifications whose atoms are grounded by finite-domain constraints
//! are compiled into DFAs, used to generate labeled sequence datasets by
//! constrained random walks, and evaluated probabilistically with exact,
//! fuzzy and sd-DNNF temporal inference engines.

pub mod automata;
pub mod circuits;
pub mod constraints;
pub mod error;
pub mod inference;
pub mod ltlf;
pub mod taskgen;

pub use error::{Error, Result};
