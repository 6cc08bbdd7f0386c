use super::prop::{PropFormula, Var};
use super::semiring::{LiteralWeights, Semiring};
use crate::error::{Error, Result};

pub const BRUTE_FORCE_VAR_CAP: usize = 20;

/// Weighted model count by enumerating every assignment of the weighted
/// variables. Test oracle; exponential.
pub fn brute_force_wmc<S: Semiring>(
    f: &PropFormula,
    weights: &LiteralWeights<S::Value>,
    s: &S,
) -> Result<S::Value> {
    let mut vars: Vec<Var> = weights.vars().collect();
    for v in f.vars() {
        if !vars.contains(&v) {
            return Err(Error::domain(format!("no weight for variable {v}")));
        }
    }
    vars.sort_unstable();
    if vars.len() > BRUTE_FORCE_VAR_CAP {
        return Err(Error::Resource(format!(
            "{} variables exceeds the brute-force cap of {BRUTE_FORCE_VAR_CAP}",
            vars.len()
        )));
    }
    let mut total = s.zero();
    for bits in 0u64..1 << vars.len() {
        let value = |v: Var| {
            let i = vars.binary_search(&v).expect("weighted variable");
            bits >> i & 1 == 1
        };
        if !f.eval(&value) {
            continue;
        }
        let mut w = s.one();
        for (i, &v) in vars.iter().enumerate() {
            w = s.times(w, weights.get(v, bits >> i & 1 == 1)?);
        }
        total = s.plus(total, w);
    }
    Ok(total)
}

/// Structural semiring evaluation of the negation normal form of `f`:
/// literals map to weights, And to `times`, Or to `plus`. Exact only when
/// `f` happens to be deterministic and decomposable, or at 0/1 weights.
pub fn fuzzy_eval<S: Semiring>(
    f: &PropFormula,
    weights: &LiteralWeights<S::Value>,
    s: &S,
) -> Result<S::Value> {
    if f.is_nnf() {
        eval_nnf(f, weights, s)
    } else {
        eval_nnf(&f.to_nnf(), weights, s)
    }
}

fn eval_nnf<S: Semiring>(f: &PropFormula, w: &LiteralWeights<S::Value>, s: &S) -> Result<S::Value> {
    Ok(match f {
        PropFormula::True => s.one(),
        PropFormula::False => s.zero(),
        PropFormula::Var(v) => w.get(*v, true)?,
        PropFormula::Not(a) => match **a {
            PropFormula::Var(v) => w.get(v, false)?,
            _ => unreachable!("input is in negation normal form"),
        },
        PropFormula::And(cs) => {
            let mut acc = s.one();
            for c in cs {
                acc = s.times(acc, eval_nnf(c, w, s)?);
            }
            acc
        }
        PropFormula::Or(cs) => {
            let mut acc = s.zero();
            for c in cs {
                acc = s.plus(acc, eval_nnf(c, w, s)?);
            }
            acc
        }
    })
}
