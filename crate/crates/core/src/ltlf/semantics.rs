use super::formula::Formula;

/// Direct recursive LTLf semantics over a non-empty finite trace.
///
/// `trace[t]` is a bitmask over `atoms` (bit `i` is `atoms[i]`). Works on any
/// formula, NNF or not; atoms missing from `atoms` read as false. This is the
/// reference the automaton construction is checked against.
pub fn trace_satisfies(f: &Formula, atoms: &[String], trace: &[u32]) -> bool {
    !trace.is_empty() && holds(f, atoms, trace, 0)
}

fn holds(f: &Formula, atoms: &[String], trace: &[u32], i: usize) -> bool {
    use Formula::*;
    let n = trace.len();
    debug_assert!(i < n);
    match f {
        True => true,
        False => false,
        Atom(name) => atoms
            .iter()
            .position(|a| a.as_str() == &**name)
            .is_some_and(|bit| trace[i] >> bit & 1 == 1),
        Not(a) => !holds(a, atoms, trace, i),
        And(a, b) => holds(a, atoms, trace, i) && holds(b, atoms, trace, i),
        Or(a, b) => holds(a, atoms, trace, i) || holds(b, atoms, trace, i),
        Implies(a, b) => !holds(a, atoms, trace, i) || holds(b, atoms, trace, i),
        Iff(a, b) => holds(a, atoms, trace, i) == holds(b, atoms, trace, i),
        Next(a) => i + 1 < n && holds(a, atoms, trace, i + 1),
        WeakNext(a) => i + 1 >= n || holds(a, atoms, trace, i + 1),
        Finally(a) => (i..n).any(|j| holds(a, atoms, trace, j)),
        Globally(a) => (i..n).all(|j| holds(a, atoms, trace, j)),
        Until(a, b) => (i..n).any(|j| {
            holds(b, atoms, trace, j) && (i..j).all(|k| holds(a, atoms, trace, k))
        }),
        Release(a, b) => (i..n).all(|j| {
            holds(b, atoms, trace, j) || (i..j).any(|k| holds(a, atoms, trace, k))
        }),
    }
}
