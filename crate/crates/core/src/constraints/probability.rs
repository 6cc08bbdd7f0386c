use std::collections::BTreeMap;

use super::constraint::{Constraint, Indexed};
use super::domain::VariableSpec;
use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-9;

/// Exact probability that `c` holds when each variable independently
/// follows `dists[i]` (indexed by position in `vars[i].domain`).
///
/// Linear comparisons convolve the distribution of the weighted sum;
/// global constraints enumerate the joint values of their variables.
pub fn constraint_probability(c: &Constraint, vars: &[VariableSpec], dists: &[Vec<f64>]) -> Result<f64> {
    check_distributions(vars, dists)?;
    let names: Vec<String> = vars.iter().map(|v| v.name.clone()).collect();
    let ix = Indexed::new(c, &names)?;
    Ok(indexed_probability(&ix, vars, dists))
}

pub(crate) fn check_distributions(vars: &[VariableSpec], dists: &[Vec<f64>]) -> Result<()> {
    if vars.len() != dists.len() {
        return Err(Error::domain(format!(
            "{} distributions for {} variables",
            dists.len(),
            vars.len()
        )));
    }
    for (v, d) in vars.iter().zip(dists) {
        if d.len() != v.domain.len() {
            return Err(Error::domain(format!(
                "distribution for `{}` has {} entries, domain has {}",
                v.name,
                d.len(),
                v.domain.len()
            )));
        }
        if d.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::domain(format!("distribution for `{}` has a negative entry", v.name)));
        }
        let s: f64 = d.iter().sum();
        if (s - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::domain(format!("distribution for `{}` sums to {s}", v.name)));
        }
    }
    Ok(())
}

pub(crate) fn indexed_probability(ix: &Indexed, vars: &[VariableSpec], dists: &[Vec<f64>]) -> f64 {
    match ix {
        Indexed::Linear { coeffs, constant, op } => {
            let mut sum: BTreeMap<i64, f64> = BTreeMap::from([(0, 1.0)]);
            for &(k, i) in coeffs {
                let mut next: BTreeMap<i64, f64> = BTreeMap::new();
                for (&s, &ps) in &sum {
                    for (&v, &pv) in vars[i].domain.values().iter().zip(&dists[i]) {
                        if pv > 0.0 {
                            *next.entry(s + k * v).or_default() += ps * pv;
                        }
                    }
                }
                sum = next;
            }
            sum.iter()
                .filter(|(&s, _)| op.holds(s + constant, 0))
                .map(|(_, &p)| p)
                .sum()
        }
        _ => {
            let pos = ix.positions();
            let mut values: Vec<i64> = vars.iter().map(|v| v.domain.values()[0]).collect();
            let mut total = 0.0;
            enumerate(&pos, 0, 1.0, vars, dists, &mut values, &mut |vals, w| {
                if ix.holds(vals) {
                    total += w;
                }
            });
            total
        }
    }
}

fn enumerate(
    pos: &[usize],
    depth: usize,
    weight: f64,
    vars: &[VariableSpec],
    dists: &[Vec<f64>],
    values: &mut Vec<i64>,
    visit: &mut dyn FnMut(&[i64], f64),
) {
    if depth == pos.len() {
        visit(values, weight);
        return;
    }
    let i = pos[depth];
    for (&v, &p) in vars[i].domain.values().iter().zip(&dists[i]) {
        if p > 0.0 {
            values[i] = v;
            enumerate(pos, depth + 1, weight * p, vars, dists, values, visit);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::constraint::eval_constraint;
    use crate::constraints::domain::SymbolicDomain;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn vars(names: &[&str], d: SymbolicDomain) -> Vec<VariableSpec> {
        let d = Arc::new(d);
        names.iter().map(|n| VariableSpec::new(n, d.clone(), None)).collect()
    }

    fn one_hot(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    /// Oracle: sum over the full joint product.
    fn brute(c: &Constraint, vs: &[VariableSpec], dists: &[Vec<f64>]) -> f64 {
        let mut total = 0.0;
        let sizes: Vec<usize> = vs.iter().map(|v| v.domain.len()).collect();
        let n: usize = sizes.iter().product();
        for mut code in 0..n {
            let mut w = 1.0;
            let mut a = std::collections::BTreeMap::new();
            for (j, v) in vs.iter().enumerate() {
                let i = code % sizes[j];
                code /= sizes[j];
                w *= dists[j][i];
                a.insert(v.name.clone(), v.domain.values()[i]);
            }
            if c.holds(&|x| a.get(x).copied()).unwrap() {
                total += w;
            }
        }
        total
    }

    fn random_dist(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    }

    #[test]
    fn frozen_values() {
        let abc = vars(&["A", "B", "C"], SymbolicDomain::from_range("d", 0, 9).unwrap());
        let c = Constraint::parse("p", "A + B = C").unwrap();
        let d = vec![one_hot(10, 0), one_hot(10, 8), one_hot(10, 8)];
        assert_eq!(constraint_probability(&c, &abc, &d).unwrap(), 1.0);

        let yz = vars(&["Y", "Z"], SymbolicDomain::from_range("d", 0, 9).unwrap());
        let lt = Constraint::parse("p", "Y < Z").unwrap();
        let u = vec![vec![0.1; 10], vec![0.1; 10]];
        assert!((constraint_probability(&lt, &yz, &u).unwrap() - 0.45).abs() < 1e-12);

        let vwx = vars(&["V", "W", "X"], SymbolicDomain::from_range("d", 0, 4).unwrap());
        let ae = Constraint::parse("q", "all_equal(V, W, X)").unwrap();
        let u = vec![vec![0.2; 5]; 3];
        assert!((constraint_probability(&ae, &vwx, &u).unwrap() - 0.04).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force() {
        let xyzw = vars(&["W", "X", "Y", "Z"], SymbolicDomain::from_range("d", 0, 9).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for text in ["Y < Z", "X < Y + Z", "W + X = Y + Z", "X + Y = 2*Z", "X + Y = Z", "all_different(X, Y, Z)", "all_equal(W, X)", "3 - X >= Y"] {
            let c = Constraint::parse("p", text).unwrap();
            for _ in 0..5 {
                let d: Vec<Vec<f64>> = (0..4).map(|_| random_dist(&mut rng, 10)).collect();
                let got = constraint_probability(&c, &xyzw, &d).unwrap();
                assert!((got - brute(&c, &xyzw, &d)).abs() < 1e-12, "{text}");
            }
        }
    }

    #[test]
    fn one_hot_equals_evaluation() {
        let xyz = vars(&["X", "Y", "Z"], SymbolicDomain::from_range("d", 0, 9).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = Constraint::parse("p", "X < Y + Z").unwrap();
        for _ in 0..200 {
            let idx: Vec<usize> = (0..3).map(|_| rng.gen_range(0..10)).collect();
            let d: Vec<Vec<f64>> = idx.iter().map(|&i| one_hot(10, i)).collect();
            let a = xyz.iter().zip(&idx).map(|(v, &i)| (v.name.clone(), i as i64)).collect();
            let want = eval_constraint(&c, &xyz, &a).unwrap() as u8 as f64;
            assert_eq!(constraint_probability(&c, &xyz, &d).unwrap(), want);
        }
    }

    #[test]
    fn mixture_is_average_of_one_hots() {
        let yz = vars(&["Y", "Z"], SymbolicDomain::from_range("d", 0, 9).unwrap());
        let c = Constraint::parse("p", "Y < Z").unwrap();
        let mut acc = 0.0;
        for y in 0..10 {
            for z in 0..10 {
                acc += constraint_probability(&c, &yz, &[one_hot(10, y), one_hot(10, z)]).unwrap();
            }
        }
        let mixed = constraint_probability(&c, &yz, &[vec![0.1; 10], vec![0.1; 10]]).unwrap();
        assert!((mixed - acc / 100.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized() {
        let yz = vars(&["Y", "Z"], SymbolicDomain::from_range("d", 0, 1).unwrap());
        let c = Constraint::parse("p", "Y < Z").unwrap();
        assert!(constraint_probability(&c, &yz, &[vec![0.5, 0.6], vec![0.5, 0.5]]).is_err());
        assert!(constraint_probability(&c, &yz, &[vec![-0.5, 1.5], vec![0.5, 0.5]]).is_err());
        assert!(constraint_probability(&c, &yz, &[vec![1.0], vec![0.5, 0.5]]).is_err());
    }
}
