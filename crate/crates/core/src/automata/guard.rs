use super::dfa::{Dfa, Letter, StateId};
use crate::circuits::PropFormula;

/// Propositional condition on a transition `source -> target`.
///
/// `formula` is a DNF over atom variables (atom `i` is variable `i`) whose
/// cubes are pairwise disjoint and cover exactly `letters`.
#[derive(Debug, Clone, PartialEq)]
pub struct Guard {
    pub source: StateId,
    pub target: StateId,
    pub letters: Vec<Letter>,
    pub formula: PropFormula,
}

/// A conjunction of literals; `None` positions are unconstrained.
type Cube = Vec<Option<bool>>;

pub fn transition_guard(d: &Dfa, source: StateId, target: StateId) -> Guard {
    let letters: Vec<Letter> = (0..d.num_letters() as Letter)
        .filter(|&l| d.next(source, l) == target)
        .collect();
    let formula = letters_to_dnf(&letters, d.atoms().len(), 0);
    Guard {
        source,
        target,
        letters,
        formula,
    }
}

/// Disjoint-cube DNF for a set of letters over `k` atoms, numbering atom
/// `i` as variable `offset + i`.
pub fn letters_to_dnf(letters: &[Letter], k: usize, offset: u32) -> PropFormula {
    let mut cubes: Vec<Cube> = letters
        .iter()
        .map(|&l| (0..k).map(|i| Some(l >> i & 1 == 1)).collect())
        .collect();
    // Merging two disjoint cubes that differ in one literal keeps the cover
    // disjoint and exact.
    'outer: loop {
        for i in 0..cubes.len() {
            for j in i + 1..cubes.len() {
                if let Some(pos) = single_difference(&cubes[i], &cubes[j]) {
                    cubes[i][pos] = None;
                    cubes.remove(j);
                    continue 'outer;
                }
            }
        }
        break;
    }
    let terms: Vec<PropFormula> = cubes
        .iter()
        .map(|cube| {
            let lits: Vec<PropFormula> = cube
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|pos| PropFormula::lit(offset + i as u32, pos)))
                .collect();
            match lits.len() {
                0 => PropFormula::True,
                1 => lits.into_iter().next().unwrap(),
                _ => PropFormula::And(lits),
            }
        })
        .collect();
    match terms.len() {
        0 => PropFormula::False,
        1 => terms.into_iter().next().unwrap(),
        _ => PropFormula::Or(terms),
    }
}

fn single_difference(a: &Cube, b: &Cube) -> Option<usize> {
    let mut diff = None;
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        match (x, y) {
            (Some(u), Some(v)) if u != v => {
                if diff.is_some() {
                    return None;
                }
                diff = Some(i);
            }
            _ if x != y => return None,
            _ => {}
        }
    }
    diff
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_letter_set_is_true() {
        let d = Dfa::new(vec!["p".into()], vec![false, true], vec![1, 1, 1, 1]).unwrap();
        assert_eq!(transition_guard(&d, 0, 1).formula, PropFormula::True);
    }

    #[test]
    fn no_letter_is_false() {
        let d = Dfa::new(vec!["p".into()], vec![false, true], vec![1, 1, 1, 1]).unwrap();
        assert_eq!(transition_guard(&d, 0, 0).formula, PropFormula::False);
    }

    #[test]
    fn three_letters_give_two_disjoint_cubes() {
        let f = letters_to_dnf(&[1, 2, 3], 2, 0);
        match &f {
            PropFormula::Or(cubes) => assert_eq!(cubes.len(), 2),
            other => panic!("unexpected {other}"),
        }
        for l in 0..4u32 {
            let val = f.eval(&|v| l >> v & 1 == 1);
            assert_eq!(val, l != 0);
        }
    }
}
