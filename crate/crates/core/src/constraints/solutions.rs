use rand::Rng;

use super::constraint::{Constraint, Indexed};
use super::domain::{VariableAssignment, VariableSpec};
use crate::automata::Letter;
use crate::error::{Error, Result};
use crate::ltlf::AtomAssignment;

/// Joint assignments beyond this many are refused.
pub const MAX_ASSIGNMENTS: usize = 10_000_000;

/// All assignments (values in variable order) producing one letter.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolutionSet {
    rows: Vec<Vec<i64>>,
}

impl SolutionSet {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }
}

/// Per-letter solution sets for a fixed list of constraints (atom `i` is
/// constraint `i`) over a fixed list of variables. Built eagerly in one
/// pass over the Cartesian product, so the sets are disjoint and cover it.
#[derive(Debug, Clone)]
pub struct SolutionCache {
    var_names: Vec<String>,
    sets: Vec<SolutionSet>,
}

impl SolutionCache {
    pub fn build(constraints: &[Constraint], vars: &[VariableSpec]) -> Result<Self> {
        if constraints.len() > 16 {
            return Err(Error::Resource(format!("{} constraints is too many atoms", constraints.len())));
        }
        let names: Vec<String> = vars.iter().map(|v| v.name.clone()).collect();
        let indexed: Vec<Indexed> = constraints
            .iter()
            .map(|c| Indexed::new(c, &names))
            .collect::<Result<_>>()?;
        let total = vars
            .iter()
            .try_fold(1usize, |acc, v| acc.checked_mul(v.domain.len()))
            .filter(|&n| n <= MAX_ASSIGNMENTS)
            .ok_or_else(|| Error::Resource("joint assignment space too large to enumerate".into()))?;
        let mut sets = vec![SolutionSet::default(); 1 << constraints.len()];
        let mut idx = vec![0usize; vars.len()];
        let mut values: Vec<i64> = vars.iter().map(|v| v.domain.values()[0]).collect();
        for _ in 0..total {
            let letter = indexed
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, c)| acc | (c.holds(&values) as usize) << i);
            sets[letter].rows.push(values.clone());
            // odometer, last variable fastest
            for j in (0..vars.len()).rev() {
                idx[j] += 1;
                if idx[j] < vars[j].domain.len() {
                    values[j] = vars[j].domain.values()[idx[j]];
                    break;
                }
                idx[j] = 0;
                values[j] = vars[j].domain.values()[0];
            }
        }
        Ok(SolutionCache { var_names: names, sets })
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn num_letters(&self) -> usize {
        self.sets.len()
    }

    pub fn get(&self, letter: Letter) -> &SolutionSet {
        &self.sets[letter as usize]
    }

    pub fn usable(&self, letter: Letter) -> bool {
        !self.sets[letter as usize].is_empty()
    }

    pub fn usable_letters(&self) -> Vec<Letter> {
        (0..self.sets.len() as Letter).filter(|&l| self.usable(l)).collect()
    }

    /// Uniform draw from the solution set of `letter`, as raw values.
    pub fn sample_values<R: Rng + ?Sized>(&self, letter: Letter, rng: &mut R) -> Result<&[i64]> {
        let set = self
            .sets
            .get(letter as usize)
            .ok_or_else(|| Error::domain(format!("letter {letter} out of range")))?;
        if set.is_empty() {
            return Err(Error::UnsatisfiableLetter { letter });
        }
        Ok(&set.rows[rng.gen_range(0..set.len())])
    }

    pub fn sample_solution<R: Rng + ?Sized>(&self, letter: Letter, rng: &mut R) -> Result<VariableAssignment> {
        let row = self.sample_values(letter, rng)?;
        Ok(self.var_names.iter().cloned().zip(row.iter().copied()).collect())
    }
}

/// Converts a named truth assignment into a letter over `constraints`.
pub fn letter_of(letter: &AtomAssignment, constraints: &[Constraint]) -> Result<Letter> {
    constraints.iter().enumerate().try_fold(0, |acc, (i, c)| {
        let v = letter
            .get(&c.name)
            .ok_or_else(|| Error::domain(format!("letter does not assign atom `{}`", c.name)))?;
        Ok(acc | (*v as Letter) << i)
    })
}

/// Every assignment to `vars` whose constraint truths equal `letter`.
pub fn enumerate_solutions(
    letter: &AtomAssignment,
    constraints: &[Constraint],
    vars: &[VariableSpec],
) -> Result<SolutionSet> {
    let l = letter_of(letter, constraints)?;
    Ok(SolutionCache::build(constraints, vars)?.get(l).clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::domain::SymbolicDomain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn xyz() -> Vec<VariableSpec> {
        let d = Arc::new(SymbolicDomain::from_range("digit", 0, 9).unwrap());
        ["X", "Y", "Z"].iter().map(|n| VariableSpec::new(n, d.clone(), None)).collect()
    }

    fn letter(pairs: &[(&str, bool)]) -> AtomAssignment {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn frozen_counts() {
        let sum = vec![Constraint::parse("p", "X + Y = Z").unwrap()];
        assert_eq!(enumerate_solutions(&letter(&[("p", true)]), &sum, &xyz()).unwrap().len(), 55);
        let ad = vec![Constraint::parse("q", "all_different(X, Y, Z)").unwrap()];
        assert_eq!(enumerate_solutions(&letter(&[("q", true)]), &ad, &xyz()).unwrap().len(), 720);
        assert_eq!(enumerate_solutions(&letter(&[]), &[], &xyz()).unwrap().len(), 1000);
    }

    #[test]
    fn buckets_partition_the_product() {
        let cs = vec![
            Constraint::parse("p", "X + Y = Z").unwrap(),
            Constraint::parse("q", "all_different(X, Y, Z)").unwrap(),
        ];
        let cache = SolutionCache::build(&cs, &xyz()).unwrap();
        let total: usize = (0..4).map(|l| cache.get(l).len()).sum();
        assert_eq!(total, 1000);
        let mut all: Vec<&Vec<i64>> = (0..4).flat_map(|l| cache.get(l).rows()).collect();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 1000);
    }

    #[test]
    fn empty_letter_is_unsatisfiable() {
        let cs = vec![
            Constraint::parse("p", "X < Y").unwrap(),
            Constraint::parse("q", "X > Y").unwrap(),
        ];
        let cache = SolutionCache::build(&cs, &xyz()).unwrap();
        assert!(!cache.usable(0b11));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            cache.sample_solution(0b11, &mut rng),
            Err(Error::UnsatisfiableLetter { letter: 3 })
        ));
    }

    #[test]
    fn singleton_and_determinism() {
        let d = Arc::new(SymbolicDomain::from_range("d", 0, 9).unwrap());
        let vars = vec![VariableSpec::new("X", d.clone(), None), VariableSpec::new("Y", d, None)];
        let cs = vec![Constraint::parse("p", "X + Y = 18").unwrap()];
        let cache = SolutionCache::build(&cs, &vars).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let a = cache.sample_solution(1, &mut rng).unwrap();
            assert_eq!(a["X"], 9);
            assert_eq!(a["Y"], 9);
        }
        let draw = |seed| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            cache.sample_solution(0, &mut r).unwrap()
        };
        assert_eq!(draw(5), draw(5));
    }

    #[test]
    fn sampling_is_uniform() {
        let cs = vec![Constraint::parse("p", "X + Y = Z").unwrap()];
        let cache = SolutionCache::build(&cs, &xyz()).unwrap();
        let set = cache.get(1);
        let mut counts = vec![0usize; set.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 100_000;
        for _ in 0..n {
            let row = cache.sample_values(1, &mut rng).unwrap();
            counts[set.rows().iter().position(|r| r.as_slice() == row).unwrap()] += 1;
        }
        let p = 1.0 / 55.0;
        let mean = n as f64 * p;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() <= 5.0 * sigma, "{c} vs {mean}");
        }
    }
}
