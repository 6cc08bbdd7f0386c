use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A letter is a truth assignment to the automaton's atoms, bit `i` being
/// `atoms[i]`.
pub type Letter = u32;

pub type StateId = usize;

/// Complete DFA over atom truth assignments. State 0 is initial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    atoms: Vec<String>,
    accepting: Vec<bool>,
    /// `delta[state * num_letters + letter]`
    delta: Vec<StateId>,
}

#[derive(Serialize, Deserialize)]
struct DfaJson {
    atoms: Vec<String>,
    states: usize,
    initial: StateId,
    accepting: Vec<StateId>,
    transitions: Vec<TransitionJson>,
}

#[derive(Serialize, Deserialize)]
struct TransitionJson {
    from: StateId,
    letter: Letter,
    to: StateId,
}

impl Dfa {
    /// Builds a DFA from a dense transition table, validating totality.
    pub fn new(atoms: Vec<String>, accepting: Vec<bool>, delta: Vec<StateId>) -> Result<Dfa> {
        if atoms.len() > 16 {
            return Err(Error::Resource(format!(
                "{} atoms give 2^{} letters per state",
                atoms.len(),
                atoms.len()
            )));
        }
        let states = accepting.len();
        if states == 0 {
            return Err(Error::domain("a DFA needs at least one state"));
        }
        let letters = 1usize << atoms.len();
        if delta.len() != states * letters {
            return Err(Error::domain(format!(
                "transition table has {} entries, expected {}",
                delta.len(),
                states * letters
            )));
        }
        if let Some(bad) = delta.iter().find(|&&t| t >= states) {
            return Err(Error::domain(format!("transition to unknown state {bad}")));
        }
        Ok(Dfa {
            atoms,
            accepting,
            delta,
        })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn num_letters(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn initial(&self) -> StateId {
        0
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        self.accepting[s]
    }

    pub fn accepting_states(&self) -> Vec<StateId> {
        (0..self.num_states()).filter(|&s| self.accepting[s]).collect()
    }

    pub fn next(&self, s: StateId, letter: Letter) -> StateId {
        self.delta[s * self.num_letters() + letter as usize]
    }

    fn check_letter(&self, letter: Letter) -> Result<()> {
        if (letter as usize) < self.num_letters() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "letter {letter} out of range for {} atoms",
                self.atoms.len()
            )))
        }
    }

    /// States visited after each letter.
    pub fn run(&self, trace: &[Letter]) -> Result<Vec<StateId>> {
        let mut s = self.initial();
        let mut out = Vec::with_capacity(trace.len());
        for &letter in trace {
            self.check_letter(letter)?;
            s = self.next(s, letter);
            out.push(s);
        }
        Ok(out)
    }

    pub fn accepts(&self, trace: &[Letter]) -> Result<bool> {
        if trace.is_empty() {
            return Err(Error::domain("cannot classify an empty trace"));
        }
        let states = self.run(trace)?;
        Ok(self.accepting[*states.last().unwrap()])
    }

    /// Encodes a letter from per-atom truth values.
    pub fn letter_of(truths: &[bool]) -> Letter {
        truths
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &t)| acc | (u32::from(t) << i))
    }

    pub fn letter_truths(&self, letter: Letter) -> Vec<bool> {
        (0..self.atoms.len()).map(|i| letter >> i & 1 == 1).collect()
    }

    pub fn to_json(&self) -> String {
        let dump = DfaJson {
            atoms: self.atoms.clone(),
            states: self.num_states(),
            initial: 0,
            accepting: self.accepting_states(),
            transitions: (0..self.num_states())
                .flat_map(|s| {
                    (0..self.num_letters() as Letter).map(move |l| TransitionJson {
                        from: s,
                        letter: l,
                        to: self.next(s, l),
                    })
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dump).expect("DFA dump is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Dfa> {
        let dump: DfaJson = serde_json::from_str(text)?;
        if dump.initial != 0 {
            return Err(Error::domain("initial state must be 0"));
        }
        let letters = 1usize << dump.atoms.len();
        let mut delta = vec![usize::MAX; dump.states * letters];
        for t in &dump.transitions {
            if t.from >= dump.states || t.letter as usize >= letters {
                return Err(Error::domain(format!(
                    "transition ({}, {}) out of range",
                    t.from, t.letter
                )));
            }
            delta[t.from * letters + t.letter as usize] = t.to;
        }
        if delta.contains(&usize::MAX) {
            return Err(Error::domain("transition table is not total"));
        }
        let mut accepting = vec![false; dump.states];
        for &s in &dump.accepting {
            *accepting
                .get_mut(s)
                .ok_or_else(|| Error::domain(format!("accepting state {s} out of range")))? = true;
        }
        Dfa::new(dump.atoms, accepting, delta)
    }
}
