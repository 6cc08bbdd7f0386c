//! Finite domains, relational constraints, solution caches and exact
//! satisfaction probabilities.

mod constraint;
mod domain;
mod probability;
mod solutions;

pub use constraint::{eval_constraint, CmpOp, Constraint, ConstraintBody, LinExpr};
#[allow(unused_imports)]
pub(crate) use constraint::Indexed;
pub use domain::{SymbolicDomain, VariableAssignment, VariableSpec};
pub use probability::constraint_probability;
#[allow(unused_imports)]
pub(crate) use probability::{check_distributions, indexed_probability};
pub use solutions::{enumerate_solutions, letter_of, SolutionCache, SolutionSet, MAX_ASSIGNMENTS};
