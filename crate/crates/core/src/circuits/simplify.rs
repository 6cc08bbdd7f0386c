use super::prop::{fold_junction, PropFormula};

/// Equivalence-preserving simplification.
///
/// Works on the negation normal form and repeats until nothing changes:
/// constant folding, flattening, idempotence, complementation (`a | !a`),
/// absorption (`a | (a & b) -> a`) and its redundancy variant
/// (`a | (!a & b) -> a | b`), each with its dual.
pub fn simplify(f: &PropFormula) -> PropFormula {
    let mut cur = f.to_nnf();
    loop {
        let next = step(&cur);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn step(f: &PropFormula) -> PropFormula {
    match f {
        PropFormula::And(cs) => junction(cs.iter().map(step).collect(), true),
        PropFormula::Or(cs) => junction(cs.iter().map(step).collect(), false),
        _ => f.clone(),
    }
}

fn negate_literal(f: &PropFormula) -> Option<PropFormula> {
    f.as_literal().map(|(v, pos)| PropFormula::lit(v, !pos))
}

/// Operands of `f` viewed as a junction of the dual kind.
fn dual_operands(f: &PropFormula, is_and: bool) -> Vec<PropFormula> {
    match (f, is_and) {
        (PropFormula::Or(cs), true) | (PropFormula::And(cs), false) => cs.clone(),
        _ => vec![f.clone()],
    }
}

fn junction(children: Vec<PropFormula>, is_and: bool) -> PropFormula {
    let zero = if is_and {
        PropFormula::False
    } else {
        PropFormula::True
    };
    let folded = fold_junction(children.into_iter(), is_and);
    let mut ops = match (&folded, is_and) {
        (PropFormula::And(cs), true) | (PropFormula::Or(cs), false) => cs.clone(),
        _ => return folded,
    };

    // complementation
    for op in &ops {
        if let Some(neg) = negate_literal(op) {
            if ops.contains(&neg) {
                return zero;
            }
        }
    }

    // redundancy: a | (!a & b) -> a | b
    let literals: Vec<PropFormula> = ops.iter().filter(|o| o.as_literal().is_some()).cloned().collect();
    for op in ops.iter_mut() {
        let inner = dual_operands(op, is_and);
        if inner.len() < 2 {
            continue;
        }
        let kept: Vec<PropFormula> = inner
            .iter()
            .filter(|x| {
                negate_literal(x).is_none_or(|neg| !literals.contains(&neg))
            })
            .cloned()
            .collect();
        if kept.len() != inner.len() {
            *op = fold_junction(kept.into_iter(), !is_and);
        }
    }

    // absorption
    let sets: Vec<Vec<PropFormula>> = ops.iter().map(|o| dual_operands(o, is_and)).collect();
    let mut keep = vec![true; ops.len()];
    for i in 0..ops.len() {
        for j in 0..ops.len() {
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
    let ops = ops.into_iter().zip(keep).filter_map(|(o, k)| k.then_some(o));
    fold_junction(ops, is_and)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> PropFormula {
        PropFormula::var(i)
    }

    #[test]
    fn absorption_with_constant() {
        // (a & true) | (a & b) -> a
        let f = PropFormula::or(vec![
            PropFormula::and(vec![v(0), PropFormula::True]),
            PropFormula::and(vec![v(0), v(1)]),
        ]);
        assert_eq!(simplify(&f), v(0));
    }

    #[test]
    fn excluded_middle() {
        let f = PropFormula::or(vec![v(0), PropFormula::not(v(0))]);
        assert_eq!(simplify(&f), PropFormula::True);
        let g = PropFormula::and(vec![v(0), PropFormula::not(v(0))]);
        assert_eq!(simplify(&g), PropFormula::False);
    }

    #[test]
    fn redundancy_makes_disjoint_cover_overlap() {
        // p | (!p & q) -> p | q
        let f = PropFormula::or(vec![
            v(0),
            PropFormula::and(vec![PropFormula::not(v(0)), v(1)]),
        ]);
        assert_eq!(simplify(&f), PropFormula::or(vec![v(0), v(1)]));
    }

    #[test]
    fn double_negation_and_de_morgan() {
        let f = PropFormula::not(PropFormula::or(vec![PropFormula::not(v(0)), v(1)]));
        assert_eq!(
            simplify(&f),
            PropFormula::and(vec![v(0), PropFormula::not(v(1))])
        );
    }
}
