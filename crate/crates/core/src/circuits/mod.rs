//! Propositional formulas, sd-DNNF compilation and algebraic model counting.

mod circuit;
mod prop;
mod semiring;
mod simplify;
mod transition;
mod wmc;

pub use circuit::{
    amc, compile_sddnnf, compile_sddnnf_with_cap, smooth, Circuit, Node, NodeId, DEFAULT_VAR_CAP,
};
pub use prop::{PropFormula, Var};
pub use semiring::{Boolean, LiteralWeights, LogProbability, Probability, Semiring};
pub use simplify::simplify;
pub use transition::{atom_var, next_state_formulas, state_var, variable_order};
pub use wmc::{brute_force_wmc, fuzzy_eval, BRUTE_FORCE_VAR_CAP};
