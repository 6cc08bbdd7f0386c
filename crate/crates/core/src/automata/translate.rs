use std::collections::HashMap;

use super::dfa::{Dfa, StateId};
use super::minimize::minimize;
use crate::error::{Error, Result};
use crate::ltlf::{canonical, eval_empty, progress_with, to_nnf, Formula};

pub const DEFAULT_STATE_CAP: usize = 10_000;

/// Translates an LTLf formula into a complete, minimal DFA over `atoms`.
pub fn ltlf_to_dfa(f: &Formula, atoms: &[String]) -> Result<Dfa> {
    ltlf_to_dfa_with_cap(f, atoms, DEFAULT_STATE_CAP)
}

/// As [`ltlf_to_dfa`], failing once more than `cap` progression states are
/// discovered.
pub fn ltlf_to_dfa_with_cap(f: &Formula, atoms: &[String], cap: usize) -> Result<Dfa> {
    Ok(minimize(&progression_automaton(f, atoms, cap)?))
}

/// The unminimized automaton whose states are canonical progression
/// formulas, in discovery order.
pub fn progression_automaton(f: &Formula, atoms: &[String], cap: usize) -> Result<Dfa> {
    for a in f.atoms() {
        if !atoms.contains(&a) {
            return Err(Error::domain(format!("atom `{a}` missing from the alphabet")));
        }
    }
    if atoms.len() > 16 {
        return Err(Error::Resource(format!("{} atoms is too many letters", atoms.len())));
    }
    let bit: HashMap<&str, usize> = atoms.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
    let letters = 1u32 << atoms.len();

    let initial = canonical(&to_nnf(f));
    let mut ids: HashMap<Formula, StateId> = HashMap::new();
    let mut states = vec![initial.clone()];
    ids.insert(initial, 0);
    let mut delta: Vec<StateId> = Vec::new();

    let mut i = 0;
    while i < states.len() {
        let state = states[i].clone();
        for letter in 0..letters {
            let lookup = |name: &str| bit.get(name).map(|&b| letter >> b & 1 == 1);
            let next = progress_with(&state, &lookup)?;
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    if states.len() >= cap {
                        return Err(Error::Resource(format!(
                            "more than {cap} automaton states for formula `{f}`"
                        )));
                    }
                    let id = states.len();
                    ids.insert(next.clone(), id);
                    states.push(next);
                    id
                }
            };
            delta.push(id);
        }
        i += 1;
    }
    let accepting = states.iter().map(eval_empty).collect();
    Dfa::new(atoms.to_vec(), accepting, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::transition_guard;
    use crate::ltlf::{parse_ltlf, trace_satisfies};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TASKS: [(&str, usize); 7] = [
        ("G (p <-> X X q)", 8),
        ("G ((p & X p & X X p) -> X X X q)", 5),
        ("F p & (q U X p)", 5),
        ("G (p <-> WX !p)", 4),
        ("G (p <-> X q)", 4),
        ("p & G (p <-> X q)", 4),
        ("F p", 2),
    ];

    fn pq() -> Vec<String> {
        vec!["p".into(), "q".into()]
    }

    #[test]
    fn task_state_counts() {
        for (text, states) in TASKS {
            let d = ltlf_to_dfa(&parse_ltlf(text).unwrap(), &pq()).unwrap();
            assert_eq!(d.num_states(), states, "{text}");
        }
    }

    #[test]
    fn agrees_with_direct_semantics() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (text, _) in TASKS {
            let f = parse_ltlf(text).unwrap();
            let d = ltlf_to_dfa(&f, &pq()).unwrap();
            for _ in 0..500 {
                let len = rng.gen_range(1..=10);
                let trace: Vec<u32> = (0..len).map(|_| rng.gen_range(0..4)).collect();
                assert_eq!(d.accepts(&trace).unwrap(), trace_satisfies(&f, &pq(), &trace), "{text} {trace:?}");
            }
        }
    }

    #[test]
    fn finally_matches_exhaustive_traces() {
        let f = parse_ltlf("F p").unwrap();
        let atoms = vec!["p".to_string()];
        let d = ltlf_to_dfa(&f, &atoms).unwrap();
        for len in 1..=4u32 {
            for bits in 0..1u32 << len {
                let trace: Vec<u32> = (0..len).map(|i| bits >> i & 1).collect();
                assert_eq!(d.accepts(&trace).unwrap(), trace_satisfies(&f, &atoms, &trace));
            }
        }
    }

    #[test]
    fn guards_partition_letters() {
        for (text, _) in TASKS {
            let d = ltlf_to_dfa(&parse_ltlf(text).unwrap(), &pq()).unwrap();
            for s in 0..d.num_states() {
                for l in 0..d.num_letters() as u32 {
                    let holding: Vec<usize> = (0..d.num_states())
                        .filter(|&t| transition_guard(&d, s, t).formula.eval(&|v| l >> v & 1 == 1))
                        .collect();
                    assert_eq!(holding, vec![d.next(s, l)]);
                }
            }
        }
    }

    #[test]
    fn false_and_true_formulas() {
        let t = ltlf_to_dfa(&parse_ltlf("true").unwrap(), &pq()).unwrap();
        assert_eq!(t.num_states(), 1);
        assert!(t.accepts(&[0]).unwrap());
        let f = ltlf_to_dfa(&parse_ltlf("false").unwrap(), &pq()).unwrap();
        assert!(!f.accepts(&[3, 3]).unwrap());
    }

    #[test]
    fn cap_and_missing_atom() {
        let f = parse_ltlf("G (p <-> X X q)").unwrap();
        match ltlf_to_dfa_with_cap(&f, &pq(), 3) {
            Err(Error::Resource(msg)) => assert!(msg.contains("G")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(ltlf_to_dfa(&f, &["p".to_string()]), Err(Error::Domain(_))));
    }

    #[test]
    fn dump_is_stable() {
        let f = parse_ltlf("G (p <-> X X q)").unwrap();
        let a = ltlf_to_dfa(&f, &pq()).unwrap().to_json();
        let b = ltlf_to_dfa(&f, &pq()).unwrap().to_json();
        assert_eq!(a.to_string(), b.to_string());
    }
}
