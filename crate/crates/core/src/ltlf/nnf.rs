use super::formula::Formula;

/// Negation normal form: negation only on atoms, `->`/`<->` expanded.
pub fn to_nnf(f: &Formula) -> Formula {
    pos(f)
}

fn pos(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True | False | Atom(_) => f.clone(),
        Not(a) => neg(a),
        And(a, b) => Formula::and(pos(a), pos(b)),
        Or(a, b) => Formula::or(pos(a), pos(b)),
        Implies(a, b) => Formula::or(neg(a), pos(b)),
        Iff(a, b) => Formula::or(
            Formula::and(pos(a), pos(b)),
            Formula::and(neg(a), neg(b)),
        ),
        Next(a) => Formula::next(pos(a)),
        WeakNext(a) => Formula::weak_next(pos(a)),
        Finally(a) => Formula::finally(pos(a)),
        Globally(a) => Formula::globally(pos(a)),
        Until(a, b) => Formula::until(pos(a), pos(b)),
        Release(a, b) => Formula::release(pos(a), pos(b)),
    }
}

/// NNF of `!f`.
fn neg(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True => False,
        False => True,
        Atom(_) => Formula::not(f.clone()),
        Not(a) => pos(a),
        And(a, b) => Formula::or(neg(a), neg(b)),
        Or(a, b) => Formula::and(neg(a), neg(b)),
        Implies(a, b) => Formula::and(pos(a), neg(b)),
        Iff(a, b) => Formula::or(
            Formula::and(pos(a), neg(b)),
            Formula::and(neg(a), pos(b)),
        ),
        Next(a) => Formula::weak_next(neg(a)),
        WeakNext(a) => Formula::next(neg(a)),
        Finally(a) => Formula::globally(neg(a)),
        Globally(a) => Formula::finally(neg(a)),
        Until(a, b) => Formula::release(neg(a), neg(b)),
        Release(a, b) => Formula::until(neg(a), neg(b)),
    }
}

pub fn is_nnf(f: &Formula) -> bool {
    match f {
        Formula::Not(a) => matches!(**a, Formula::Atom(_)),
        Formula::Implies(..) | Formula::Iff(..) => false,
        _ => f.children().into_iter().all(is_nnf),
    }
}
