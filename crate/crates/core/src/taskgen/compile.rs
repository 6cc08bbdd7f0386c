use crate::automata::{ltlf_to_dfa, Dfa, Letter, StateId};
use crate::constraints::{check_distributions, indexed_probability, Constraint, Indexed, SolutionCache, VariableSpec};
use crate::error::{Error, Result};
use crate::ltlf::Formula;

use super::spec::TaskSpec;

/// A task ready for generation and inference: its minimal DFA over the
/// constraint atoms (in declaration order), eager per-letter solution
/// caches and the reachability table used to steer random walks.
#[derive(Debug, Clone)]
pub struct CompiledTask {
    spec: TaskSpec,
    formula: Formula,
    variables: Vec<VariableSpec>,
    constraints: Vec<Constraint>,
    indexed: Vec<Indexed>,
    dfa: Dfa,
    cache: SolutionCache,
    usable: Vec<Letter>,
    /// `reach[label][remaining][state]`: some walk of exactly `remaining`
    /// usable letters from `state` ends accepting iff `label == 1`.
    reach: [Vec<Vec<bool>>; 2],
}

pub fn compile_task(spec: &TaskSpec) -> Result<CompiledTask> {
    let resolved = spec.resolve()?;
    let atoms = spec.atoms();
    let dfa = ltlf_to_dfa(&resolved.formula, &atoms)?;
    let cache = SolutionCache::build(&resolved.constraints, &resolved.variables)?;
    let usable = cache.usable_letters();
    let names: Vec<String> = resolved.variables.iter().map(|v| v.name.clone()).collect();
    let indexed = resolved
        .constraints
        .iter()
        .map(|c| Indexed::new(c, &names))
        .collect::<Result<Vec<_>>>()?;

    let reach = [0, 1].map(|label| {
        let mut table = vec![(0..dfa.num_states())
            .map(|s| dfa.is_accepting(s) == (label == 1))
            .collect::<Vec<bool>>()];
        for r in 1..=spec.length.max {
            let prev = &table[r - 1];
            let row = (0..dfa.num_states())
                .map(|s| usable.iter().any(|&l| prev[dfa.next(s, l)]))
                .collect();
            table.push(row);
        }
        table
    });

    let task = CompiledTask {
        spec: spec.clone(),
        formula: resolved.formula,
        variables: resolved.variables,
        constraints: resolved.constraints,
        indexed,
        dfa,
        cache,
        usable,
        reach,
    };

    let sizes = [spec.splits.train, spec.splits.val, spec.splits.test];
    let positives = sizes.iter().any(|&n| super::generate::positive_count(n, spec.positive_ratio) > 0);
    let negatives = sizes.iter().any(|&n| super::generate::positive_count(n, spec.positive_ratio) < n);
    for (label, needed) in [(1u8, positives), (0u8, negatives)] {
        if !needed {
            continue;
        }
        for len in spec.length.min..=spec.length.max {
            if !task.reachable(label, len, 0) {
                let kind = if label == 1 { "positive" } else { "negative" };
                return Err(Error::Compile(format!(
                    "task `{}`: no {kind} sequence of length {len} exists",
                    spec.name
                )));
            }
        }
    }
    Ok(task)
}

impl CompiledTask {
    pub fn spec(&self) -> &TaskSpec {
        &self.spec
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub fn atoms(&self) -> &[String] {
        self.dfa.atoms()
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn solutions(&self) -> &SolutionCache {
        &self.cache
    }

    /// Letters with at least one concrete assignment.
    pub fn usable_letters(&self) -> &[Letter] {
        &self.usable
    }

    /// Whether `remaining` more steps from `state` can end with sequence
    /// label `label`. False beyond the maximum compiled length.
    pub fn reachable(&self, label: u8, remaining: usize, state: StateId) -> bool {
        self.reach[usize::from(label == 1)]
            .get(remaining)
            .is_some_and(|row| row[state])
    }

    /// The letter produced by concrete variable values (in variable order).
    pub fn letter_of_values(&self, values: &[i64]) -> Letter {
        self.indexed
            .iter()
            .enumerate()
            .fold(0, |acc, (i, c)| acc | (c.holds(values) as Letter) << i)
    }

    /// Exact per-atom truth probabilities given independent per-variable
    /// distributions (each indexed by domain position).
    pub fn constraint_probabilities(&self, dists: &[Vec<f64>]) -> Result<Vec<f64>> {
        check_distributions(&self.variables, dists)?;
        Ok(self
            .indexed
            .iter()
            .map(|c| indexed_probability(c, &self.variables, dists).clamp(0.0, 1.0))
            .collect())
    }

    /// Guard table rows `(source, target, guard text)` for non-empty guards.
    pub fn guard_table(&self) -> Vec<(StateId, StateId, String)> {
        let names = self.atoms().to_vec();
        let mut out = Vec::new();
        for s in 0..self.dfa.num_states() {
            for t in 0..self.dfa.num_states() {
                let g = crate::automata::transition_guard(&self.dfa, s, t);
                if !g.letters.is_empty() {
                    let text = g.formula.display_with(&|v| names[v as usize].clone()).to_string();
                    out.push((s, t, text));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taskgen::builtin_task;

    #[test]
    fn builtin_state_counts() {
        for (name, m) in [("task1", 8), ("task2", 5), ("task3", 5), ("task4", 5), ("task5", 4), ("task6", 4)] {
            let t = compile_task(&builtin_task(name).unwrap()).unwrap();
            assert_eq!(t.dfa().num_states(), m, "{name}");
        }
    }

    #[test]
    fn false_formula_is_infeasible() {
        let mut spec = builtin_task("task3").unwrap();
        spec.formula = "false".into();
        match compile_task(&spec) {
            Err(Error::Compile(msg)) => assert!(msg.contains("positive") && msg.contains("length 10"), "{msg}"),
            other => panic!("{other:?}"),
        }
        spec.positive_ratio = 0.0;
        assert!(compile_task(&spec).is_ok());
    }

    #[test]
    fn task5_both_labels_at_all_lengths() {
        let t = compile_task(&builtin_task("task5").unwrap()).unwrap();
        for len in 10..=20 {
            assert!(t.reachable(1, len, 0) && t.reachable(0, len, 0));
        }
        assert!(!t.reachable(1, 21, 0));
    }

    #[test]
    fn reachability_base_case() {
        let t = compile_task(&builtin_task("task1").unwrap()).unwrap();
        for s in 0..t.dfa().num_states() {
            assert_eq!(t.reachable(1, 0, s), t.dfa().is_accepting(s));
            assert_eq!(t.reachable(0, 0, s), !t.dfa().is_accepting(s));
        }
    }

    #[test]
    fn all_task_letters_are_usable() {
        for name in ["task1", "task3", "task5", "task6"] {
            let t = compile_task(&builtin_task(name).unwrap()).unwrap();
            assert_eq!(t.usable_letters().len(), t.dfa().num_letters(), "{name}");
        }
    }
}
