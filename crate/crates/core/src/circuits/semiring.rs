use std::collections::BTreeMap;
use std::fmt::Debug;

use super::prop::Var;
use crate::error::{Error, Result};

/// Commutative semiring used for algebraic model counting.
pub trait Semiring {
    type Value: Copy + Debug + PartialEq;

    fn zero(&self) -> Self::Value;
    fn one(&self) -> Self::Value;
    fn plus(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn times(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    /// Injects a probability as a literal weight.
    #[allow(clippy::wrong_self_convention)]
    fn from_probability(&self, p: f64) -> Self::Value;
    fn name(&self) -> &'static str;
}

/// `([0, 1], +, *)`; also counts models with unit weights.
#[derive(Debug, Clone, Copy, Default)]
pub struct Probability;

/// `((-inf, 0], logsumexp, +)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LogProbability;

/// `({false, true}, or, and)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Boolean;

impl Semiring for Probability {
    type Value = f64;
    fn zero(&self) -> f64 {
        0.0
    }
    fn one(&self) -> f64 {
        1.0
    }
    fn plus(&self, a: f64, b: f64) -> f64 {
        a + b
    }
    fn times(&self, a: f64, b: f64) -> f64 {
        a * b
    }
    fn from_probability(&self, p: f64) -> f64 {
        p
    }
    fn name(&self) -> &'static str {
        "probability"
    }
}

impl Semiring for LogProbability {
    type Value = f64;
    fn zero(&self) -> f64 {
        f64::NEG_INFINITY
    }
    fn one(&self) -> f64 {
        0.0
    }
    fn plus(&self, a: f64, b: f64) -> f64 {
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        if hi == f64::NEG_INFINITY {
            return hi;
        }
        hi + (lo - hi).exp().ln_1p()
    }
    fn times(&self, a: f64, b: f64) -> f64 {
        a + b
    }
    fn from_probability(&self, p: f64) -> f64 {
        p.ln()
    }
    fn name(&self) -> &'static str {
        "log-probability"
    }
}

impl Semiring for Boolean {
    type Value = bool;
    fn zero(&self) -> bool {
        false
    }
    fn one(&self) -> bool {
        true
    }
    fn plus(&self, a: bool, b: bool) -> bool {
        a || b
    }
    fn times(&self, a: bool, b: bool) -> bool {
        a && b
    }
    fn from_probability(&self, p: f64) -> bool {
        p > 0.0
    }
    fn name(&self) -> &'static str {
        "boolean"
    }
}

/// Weights for both polarities of each variable.
#[derive(Debug, Clone, PartialEq)]
pub struct LiteralWeights<V> {
    weights: BTreeMap<Var, (V, V)>,
}

impl<V: Copy> LiteralWeights<V> {
    pub fn new() -> Self {
        LiteralWeights {
            weights: BTreeMap::new(),
        }
    }

    /// Weight `pos` for `var`, `neg` for `!var`.
    pub fn set(&mut self, var: Var, pos: V, neg: V) -> &mut Self {
        self.weights.insert(var, (pos, neg));
        self
    }

    /// Bernoulli weights `(p, 1 - p)` injected through the semiring.
    pub fn from_probabilities<S: Semiring<Value = V>>(s: &S, probs: &[(Var, f64)]) -> Self {
        let mut w = LiteralWeights::new();
        for &(v, p) in probs {
            w.set(v, s.from_probability(p), s.from_probability(1.0 - p));
        }
        w
    }

    pub fn get(&self, var: Var, positive: bool) -> Result<V> {
        let (pos, neg) = self
            .weights
            .get(&var)
            .ok_or_else(|| Error::domain(format!("no weight for variable {var}")))?;
        Ok(if positive { *pos } else { *neg })
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.weights.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

impl<V: Copy> Default for LiteralWeights<V> {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_laws<S: Semiring<Value = f64>>(s: &S, sample: impl Fn(&mut ChaCha8Rng) -> f64, tol: f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let close = |a: f64, b: f64| (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()));
        for _ in 0..100 {
            let (a, b, c) = (sample(&mut rng), sample(&mut rng), sample(&mut rng));
            assert!(close(s.plus(a, b), s.plus(b, a)));
            assert!(close(s.times(a, b), s.times(b, a)));
            assert!(close(s.plus(s.plus(a, b), c), s.plus(a, s.plus(b, c))));
            assert!(close(s.times(s.times(a, b), c), s.times(a, s.times(b, c))));
            assert!(close(
                s.times(a, s.plus(b, c)),
                s.plus(s.times(a, b), s.times(a, c))
            ));
            assert!(close(s.plus(a, s.zero()), a));
            assert!(close(s.times(a, s.one()), a));
            assert_eq!(s.times(a, s.zero()), s.zero());
        }
    }

    #[test]
    fn probability_laws() {
        check_laws(&Probability, |r| r.gen::<f64>(), 1e-12);
    }

    #[test]
    fn log_probability_laws() {
        check_laws(&LogProbability, |r| r.gen::<f64>().max(1e-300).ln(), 1e-12);
    }

    #[test]
    fn boolean_laws() {
        let s = Boolean;
        for a in [false, true] {
            for b in [false, true] {
                for c in [false, true] {
                    assert_eq!(s.times(a, s.plus(b, c)), s.plus(s.times(a, b), s.times(a, c)));
                }
            }
        }
    }

    #[test]
    fn missing_weight() {
        let w: LiteralWeights<f64> = LiteralWeights::new();
        assert!(matches!(w.get(3, true), Err(Error::Domain(_))));
    }
}
