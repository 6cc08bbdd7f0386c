use super::prop::{PropFormula, Var};
use crate::automata::{letters_to_dnf, Dfa, Letter};

/// Variable for DFA state `s`.
pub fn state_var(s: usize) -> Var {
    s as Var
}

/// Variable for atom `i` of a DFA with `num_states` states.
pub fn atom_var(num_states: usize, i: usize) -> Var {
    (num_states + i) as Var
}

/// Compilation order: states in id order, then atoms.
pub fn variable_order(d: &Dfa) -> Vec<Var> {
    (0..(d.num_states() + d.atoms().len()) as Var).collect()
}

/// One formula per next state `t`: the disjunction over sources `s` with
/// at least one `s -> t` letter of `state_s & guard(s, t)`. Single clauses
/// are not wrapped in an Or; a state with no incoming edge gets False.
pub fn next_state_formulas(d: &Dfa) -> Vec<PropFormula> {
    let m = d.num_states();
    let k = d.atoms().len();
    let mut incoming: Vec<Vec<(usize, Vec<Letter>)>> = vec![Vec::new(); m];
    for s in 0..m {
        let mut by_target: Vec<Vec<Letter>> = vec![Vec::new(); m];
        for l in 0..d.num_letters() as Letter {
            by_target[d.next(s, l)].push(l);
        }
        for (t, letters) in by_target.into_iter().enumerate() {
            if !letters.is_empty() {
                incoming[t].push((s, letters));
            }
        }
    }
    incoming
        .into_iter()
        .map(|sources| {
            let mut clauses: Vec<PropFormula> = sources
                .into_iter()
                .map(|(s, letters)| {
                    let state = PropFormula::var(state_var(s));
                    match letters_to_dnf(&letters, k, atom_var(m, 0)) {
                        PropFormula::True => state,
                        guard => PropFormula::and(vec![state, guard]),
                    }
                })
                .collect();
            match clauses.len() {
                0 => PropFormula::False,
                1 => clauses.pop().unwrap(),
                _ => PropFormula::or(clauses),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_state_transpose() {
        // letter p moves 0 -> 1, !p loops on 0, state 1 absorbing
        let d = Dfa::new(vec!["p".into()], vec![false, true], vec![0, 1, 1, 1]).unwrap();
        let fs = next_state_formulas(&d);
        assert_eq!(fs.len(), 2);
        let p = PropFormula::var(2);
        assert_eq!(
            fs[1],
            PropFormula::or(vec![
                PropFormula::and(vec![PropFormula::var(0), p.clone()]),
                PropFormula::var(1),
            ])
        );
        assert_eq!(
            fs[0],
            PropFormula::and(vec![PropFormula::var(0), PropFormula::not(p)])
        );
    }

    #[test]
    fn clause_count_is_in_degree() {
        let d = Dfa::new(
            vec!["p".into()],
            vec![false, true, false],
            vec![1, 2, 0, 2, 2, 2],
        )
        .unwrap();
        let fs = next_state_formulas(&d);
        let clauses = |f: &PropFormula| match f {
            PropFormula::Or(cs) => cs.len(),
            PropFormula::False => 0,
            _ => 1,
        };
        assert_eq!(fs.iter().map(clauses).collect::<Vec<_>>(), vec![1, 1, 3]);
    }
}
