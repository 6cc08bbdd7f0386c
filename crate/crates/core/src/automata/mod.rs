//! LTLf to DFA translation, minimization, replay and transition guards.

mod dfa;
mod guard;
mod minimize;
mod translate;

pub use dfa::{Dfa, Letter, StateId};
pub use guard::{letters_to_dnf, transition_guard, Guard};
pub use minimize::minimize;
pub use translate::{ltlf_to_dfa, ltlf_to_dfa_with_cap, progression_automaton, DEFAULT_STATE_CAP};
