use std::collections::{HashSet, VecDeque};

use super::dfa::{Dfa, Letter, StateId};

/// Minimal language-equivalent DFA (Hopcroft partition refinement).
///
/// Unreachable states are dropped first. States of the result are numbered
/// in breadth-first order from the initial state, visiting letters in
/// ascending bitmask order, so equal languages give identical tables.
pub fn minimize(d: &Dfa) -> Dfa {
    let letters = d.num_letters();
    let reachable = reachable_states(d);
    let n = d.num_states();

    let mut block_of = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<StateId>> = Vec::new();
    let (acc, rej): (Vec<StateId>, Vec<StateId>) =
        reachable.iter().partition(|&&s| d.is_accepting(s));
    for group in [acc, rej] {
        if !group.is_empty() {
            for &s in &group {
                block_of[s] = blocks.len();
            }
            blocks.push(group);
        }
    }

    // inverse[letter][target] = sources
    let mut inverse = vec![vec![Vec::new(); n]; letters];
    for &s in &reachable {
        for l in 0..letters {
            inverse[l][d.next(s, l as Letter)].push(s);
        }
    }

    let mut worklist: VecDeque<(usize, usize)> = VecDeque::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for b in 0..blocks.len() {
        for l in 0..letters {
            worklist.push_back((b, l));
            pending.insert((b, l));
        }
    }

    while let Some((splitter, l)) = worklist.pop_front() {
        pending.remove(&(splitter, l));
        let mut marked = vec![false; n];
        let mut touched = Vec::new();
        for &t in &blocks[splitter] {
            for &s in &inverse[l][t] {
                if !marked[s] {
                    marked[s] = true;
                    touched.push(block_of[s]);
                }
            }
        }
        touched.sort_unstable();
        touched.dedup();
        for b in touched {
            let (inside, outside): (Vec<StateId>, Vec<StateId>) =
                blocks[b].iter().partition(|&&s| marked[s]);
            if inside.is_empty() || outside.is_empty() {
                continue;
            }
            let new = blocks.len();
            for &s in &outside {
                block_of[s] = new;
            }
            blocks[b] = inside;
            blocks.push(outside);
            for c in 0..letters {
                if pending.contains(&(b, c)) {
                    worklist.push_back((new, c));
                    pending.insert((new, c));
                } else {
                    let smaller = if blocks[b].len() <= blocks[new].len() {
                        b
                    } else {
                        new
                    };
                    worklist.push_back((smaller, c));
                    pending.insert((smaller, c));
                }
            }
        }
    }

    let quotient_accepting: Vec<bool> = blocks.iter().map(|b| d.is_accepting(b[0])).collect();
    let quotient_delta: Vec<StateId> = blocks
        .iter()
        .flat_map(|b| (0..letters).map(|l| block_of[d.next(b[0], l as Letter)]))
        .collect();
    renumber(
        d.atoms().to_vec(),
        block_of[d.initial()],
        &quotient_accepting,
        &quotient_delta,
    )
}

fn reachable_states(d: &Dfa) -> Vec<StateId> {
    let mut seen = vec![false; d.num_states()];
    let mut order = vec![d.initial()];
    seen[d.initial()] = true;
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        for l in 0..d.num_letters() as Letter {
            let t = d.next(s, l);
            if !seen[t] {
                seen[t] = true;
                order.push(t);
            }
        }
        i += 1;
    }
    order
}

/// Breadth-first renumbering from `start`; unreachable states are dropped.
pub(crate) fn renumber(
    atoms: Vec<String>,
    start: StateId,
    accepting: &[bool],
    delta: &[StateId],
) -> Dfa {
    let letters = 1usize << atoms.len();
    let mut id = vec![usize::MAX; accepting.len()];
    let mut order = vec![start];
    id[start] = 0;
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        for l in 0..letters {
            let t = delta[s * letters + l];
            if id[t] == usize::MAX {
                id[t] = order.len();
                order.push(t);
            }
        }
        i += 1;
    }
    let new_accepting = order.iter().map(|&s| accepting[s]).collect();
    let new_delta = order
        .iter()
        .flat_map(|&s| (0..letters).map(move |l| s * letters + l))
        .map(|idx| id[delta[idx]])
        .collect();
    Dfa::new(atoms, new_accepting, new_delta).expect("renumbered table stays total")
}
