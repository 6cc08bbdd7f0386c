//! LTLf syntax: parsing, printing, negation normal form and progression.

mod formula;
mod nnf;
mod parser;
mod progress;
mod semantics;

pub use formula::{is_identifier, Formula};
pub use nnf::{is_nnf, to_nnf};
pub use parser::{parse_ltlf, RESERVED};
pub(crate) use progress::progress_with;
pub use progress::{canonical, eval_empty, progress, AtomAssignment};
pub use semantics::trace_satisfies;
