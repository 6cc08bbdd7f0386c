//! Formula progression and the canonical form used for progression states.
//!
//! A progression state is read as an obligation on the *remaining* trace,
//! which may be empty. [`eval_empty`] decides that obligation on the empty
//! remainder, so a trace `l0 .. lk` satisfies `f` iff
//! `eval_empty(progress(.. progress(f, l0) .., lk))`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::formula::Formula;
use crate::error::{Error, Result};

/// Truth value for every atom at one time step.
pub type AtomAssignment = BTreeMap<String, bool>;

/// Truth of an NNF formula on the empty trace.
pub fn eval_empty(f: &Formula) -> bool {
    use Formula::*;
    match f {
        True => true,
        False | Atom(_) | Not(_) => false,
        And(a, b) => eval_empty(a) && eval_empty(b),
        Or(a, b) => eval_empty(a) || eval_empty(b),
        // Not reachable for NNF input; read through the usual expansions.
        Implies(a, b) => !eval_empty(a) || eval_empty(b),
        Iff(a, b) => eval_empty(a) == eval_empty(b),
        Next(_) | Finally(_) | Until(..) => false,
        WeakNext(_) | Globally(_) | Release(..) => true,
    }
}

/// `F true`: holds exactly on non-empty remainders.
fn non_empty() -> Formula {
    Formula::finally(Formula::True)
}

/// `G false`: holds exactly on the empty remainder.
fn empty() -> Formula {
    Formula::globally(Formula::False)
}

/// Progresses an NNF formula through one letter.
///
/// Fails if the letter does not assign some atom of `f`.
pub fn progress(f: &Formula, letter: &AtomAssignment) -> Result<Formula> {
    progress_with(f, &|name| letter.get(name).copied())
}

pub(crate) fn progress_with(
    f: &Formula,
    letter: &dyn Fn(&str) -> Option<bool>,
) -> Result<Formula> {
    use Formula::*;
    let lookup = |name: &str| {
        letter(name).ok_or_else(|| Error::domain(format!("letter does not assign atom `{name}`")))
    };
    Ok(match f {
        True => True,
        False => False,
        Atom(name) => bool_formula(lookup(name)?),
        Not(inner) => match &**inner {
            Atom(name) => bool_formula(!lookup(name)?),
            _ => return Err(Error::domain("progress expects a formula in negation normal form")),
        },
        And(a, b) => mk_and(vec![progress_with(a, letter)?, progress_with(b, letter)?]),
        Or(a, b) => mk_or(vec![progress_with(a, letter)?, progress_with(b, letter)?]),
        // The remainder must be non-empty for a strong next; `F true` is only
        // needed when `a` itself would accept the empty remainder.
        Next(a) => {
            let a = canonical(a);
            if eval_empty(&a) {
                mk_and(vec![a, non_empty()])
            } else {
                a
            }
        }
        // Weak next additionally accepts an empty remainder.
        WeakNext(a) => {
            let a = canonical(a);
            if eval_empty(&a) {
                a
            } else {
                mk_or(vec![a, empty()])
            }
        }
        Globally(a) => mk_and(vec![progress_with(a, letter)?, canonical(f)]),
        Finally(a) => mk_or(vec![progress_with(a, letter)?, canonical(f)]),
        Until(a, b) => mk_or(vec![
            progress_with(b, letter)?,
            mk_and(vec![progress_with(a, letter)?, canonical(f)]),
        ]),
        Release(a, b) => mk_and(vec![
            progress_with(b, letter)?,
            mk_or(vec![progress_with(a, letter)?, canonical(f)]),
        ]),
        Implies(..) | Iff(..) => {
            return Err(Error::domain("progress expects a formula in negation normal form"))
        }
    })
}

fn bool_formula(b: bool) -> Formula {
    if b {
        Formula::True
    } else {
        Formula::False
    }
}

/// Canonical form: nested `&`/`|` flattened, operands sorted and
/// deduplicated, unit, complement and absorption rules applied, then rebuilt
/// as a left-nested chain. Temporal operands are canonicalized recursively.
pub fn canonical(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True | False | Atom(_) => f.clone(),
        Not(a) => match &**a {
            Atom(_) => f.clone(),
            True => False,
            False => True,
            _ => Formula::not(canonical(a)),
        },
        And(a, b) => mk_and(vec![canonical(a), canonical(b)]),
        Or(a, b) => mk_or(vec![canonical(a), canonical(b)]),
        Implies(a, b) => Formula::implies(canonical(a), canonical(b)),
        Iff(a, b) => Formula::iff(canonical(a), canonical(b)),
        Next(a) => Formula::next(canonical(a)),
        WeakNext(a) => Formula::weak_next(canonical(a)),
        Finally(a) => match canonical(a) {
            False => False,
            a => Formula::finally(a),
        },
        Globally(a) => match canonical(a) {
            True => True,
            a => Formula::globally(a),
        },
        // `a U true` still needs a non-empty remainder, `a R false` an empty one.
        Until(a, b) => match canonical(b) {
            True => non_empty(),
            False => False,
            b => Formula::until(canonical(a), b),
        },
        Release(a, b) => match canonical(b) {
            True => True,
            False => empty(),
            b => Formula::release(canonical(a), b),
        },
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Junction {
    And,
    Or,
}

fn flatten_into(f: Formula, kind: Junction, out: &mut Vec<Formula>) {
    match (&f, kind) {
        (Formula::And(a, b), Junction::And) | (Formula::Or(a, b), Junction::Or) => {
            flatten_into((**a).clone(), kind, out);
            flatten_into((**b).clone(), kind, out);
        }
        _ => out.push(f),
    }
}

fn operands(f: &Formula, kind: Junction) -> Vec<Formula> {
    let mut out = Vec::new();
    flatten_into(f.clone(), kind, &mut out);
    out
}

fn is_complement(a: &Formula, b: &Formula) -> bool {
    match (a, b) {
        (Formula::Not(x), y) | (y, Formula::Not(x)) => **x == *y,
        _ => false,
    }
}

fn junction(children: Vec<Formula>, kind: Junction) -> Formula {
    let (unit, zero) = match kind {
        Junction::And => (Formula::True, Formula::False),
        Junction::Or => (Formula::False, Formula::True),
    };
    let mut flat = Vec::new();
    for c in children {
        flatten_into(c, kind, &mut flat);
    }
    if flat.contains(&zero) {
        return zero;
    }
    flat.retain(|c| *c != unit);
    flat.sort();
    flat.dedup();
    for (i, a) in flat.iter().enumerate() {
        if flat[i + 1..].iter().any(|b| is_complement(a, b)) {
            return zero;
        }
    }
    // Absorption: drop an operand whose dual-junction operand set contains
    // that of another operand, e.g. a | (a & b) -> a.
    let dual = match kind {
        Junction::And => Junction::Or,
        Junction::Or => Junction::And,
    };
    let sets: Vec<Vec<Formula>> = flat.iter().map(|c| operands(c, dual)).collect();
    let mut keep = vec![true; flat.len()];
    for i in 0..flat.len() {
        for j in 0..flat.len() {
            if i != j
                && keep[j]
                && sets[j].len() < sets[i].len()
                && sets[j].iter().all(|x| sets[i].contains(x))
            {
                keep[i] = false;
                break;
            }
        }
    }
    let mut kept = flat
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c));
    let Some(first) = kept.next() else {
        return unit;
    };
    kept.fold(first, |acc, c| match kind {
        Junction::And => Formula::And(Arc::new(acc), Arc::new(c)),
        Junction::Or => Formula::Or(Arc::new(acc), Arc::new(c)),
    })
}

pub(crate) fn mk_and(children: Vec<Formula>) -> Formula {
    junction(children, Junction::And)
}

pub(crate) fn mk_or(children: Vec<Formula>) -> Formula {
    junction(children, Junction::Or)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltlf::{parse_ltlf, to_nnf};

    fn letter(pairs: &[(&str, bool)]) -> AtomAssignment {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn nnf(text: &str) -> Formula {
        canonical(&to_nnf(&parse_ltlf(text).unwrap()))
    }

    #[test]
    fn globally_persists_or_fails() {
        let g = nnf("G p");
        assert_eq!(progress(&g, &letter(&[("p", true)])).unwrap(), g);
        assert_eq!(progress(&g, &letter(&[("p", false)])).unwrap(), Formula::False);
    }

    #[test]
    fn finally_defers() {
        let f = nnf("F p");
        assert_eq!(progress(&f, &letter(&[("p", false)])).unwrap(), f);
        assert_eq!(progress(&f, &letter(&[("p", true)])).unwrap(), Formula::True);
    }

    #[test]
    fn eval_empty_table() {
        let p = Formula::atom("p");
        assert!(eval_empty(&Formula::weak_next(p.clone())));
        assert!(!eval_empty(&Formula::next(p.clone())));
        assert!(eval_empty(&Formula::globally(p.clone())));
        assert!(!eval_empty(&Formula::finally(p.clone())));
        assert!(!eval_empty(&p));
        assert!(!eval_empty(&Formula::not(p.clone())));
        assert!(!eval_empty(&Formula::until(p.clone(), p.clone())));
        assert!(eval_empty(&Formula::release(p.clone(), p)));
    }

    #[test]
    fn weak_next_accepts_end_of_trace() {
        // WX !p read at the last step must hold; X p must not.
        let wx = nnf("WX !p");
        let after = progress(&wx, &letter(&[("p", true)])).unwrap();
        assert!(eval_empty(&after));
        let x = nnf("X G p");
        let after = progress(&x, &letter(&[("p", true)])).unwrap();
        assert!(!eval_empty(&after));
    }

    #[test]
    fn missing_atom_is_domain_error() {
        let f = nnf("p & q");
        assert!(matches!(
            progress(&f, &letter(&[("p", true)])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn canonical_rules() {
        let a = Formula::atom("a");
        let b = Formula::atom("b");
        assert_eq!(
            mk_or(vec![a.clone(), mk_and(vec![a.clone(), b.clone()])]),
            a
        );
        assert_eq!(
            mk_and(vec![a.clone(), Formula::not(a.clone())]),
            Formula::False
        );
        assert_eq!(mk_or(vec![b.clone(), a.clone(), b.clone()]), mk_or(vec![a, b]));
    }
}
