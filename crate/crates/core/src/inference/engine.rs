use std::fmt;
use std::str::FromStr;

use crate::automata::{Dfa, StateId};
use crate::circuits::{
    amc, atom_var, compile_sddnnf, fuzzy_eval, next_state_formulas, simplify, smooth, state_var, variable_order,
    Circuit, LiteralWeights, LogProbability, Probability, PropFormula, Semiring,
};
use crate::error::{Error, Result};

const MASS_TOLERANCE: f64 = 1e-9;

/// Probability distribution over DFA states.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState(pub Vec<f64>);

impl BeliefState {
    pub fn one_hot(num_states: usize, s: StateId) -> Self {
        let mut v = vec![0.0; num_states];
        v[s] = 1.0;
        BeliefState(v)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn mass(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Most probable state; ties go to the smaller id.
    pub fn argmax(&self) -> StateId {
        argmax(&self.0)
    }

    fn normalize(mut self) -> Result<(Self, f64)> {
        let mass = self.mass();
        if mass <= 0.0 || !mass.is_finite() {
            return Err(Error::DegenerateBelief(mass));
        }
        for x in &mut self.0 {
            *x /= mass;
        }
        Ok((self, mass))
    }
}

/// Index of the first maximum.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EngineKind {
    Exact,
    FuzzyP,
    FuzzyLp,
    SddnnfP,
    SddnnfLp,
}

impl EngineKind {
    pub const ALL: [EngineKind; 5] = [
        EngineKind::Exact,
        EngineKind::FuzzyP,
        EngineKind::FuzzyLp,
        EngineKind::SddnnfP,
        EngineKind::SddnnfLp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EngineKind::Exact => "exact",
            EngineKind::FuzzyP => "fuzzy-p",
            EngineKind::FuzzyLp => "fuzzy-lp",
            EngineKind::SddnnfP => "sddnnf-p",
            EngineKind::SddnnfLp => "sddnnf-lp",
        }
    }

    fn log_space(self) -> bool {
        matches!(self, EngineKind::FuzzyLp | EngineKind::SddnnfLp)
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EngineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EngineKind::ALL.into_iter().find(|e| e.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = EngineKind::ALL.iter().map(|e| e.as_str()).collect();
            Error::domain(format!("unknown engine `{s}`; valid engines: {}", names.join(", ")))
        })
    }
}

/// One engine step's output. `mass` is the total belief before any
/// renormalization (fuzzy engines renormalize; sd-DNNF output is left as is).
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub belief: BeliefState,
    pub mass: f64,
}

/// Belief trace and acceptance probability of one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub beliefs: Vec<BeliefState>,
    pub masses: Vec<f64>,
    pub acceptance: f64,
}

enum Repr {
    Exact,
    Fuzzy(Vec<PropFormula>),
    Sddnnf(Vec<Circuit>),
}

/// A temporal inference engine bound to one DFA.
pub struct Engine {
    kind: EngineKind,
    dfa: Dfa,
    repr: Repr,
}

impl fmt::Debug for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Engine").field("kind", &self.kind).finish_non_exhaustive()
    }
}

impl Engine {
    pub fn new(kind: EngineKind, dfa: &Dfa) -> Result<Self> {
        let repr = match kind {
            EngineKind::Exact => Repr::Exact,
            EngineKind::FuzzyP | EngineKind::FuzzyLp => {
                Repr::Fuzzy(next_state_formulas(dfa).iter().map(simplify).collect())
            }
            EngineKind::SddnnfP | EngineKind::SddnnfLp => {
                let order = variable_order(dfa);
                Repr::Sddnnf(
                    next_state_formulas(dfa)
                        .iter()
                        .map(|f| Ok(smooth(&compile_sddnnf(f, &order)?, &order)))
                        .collect::<Result<_>>()?,
                )
            }
        };
        Ok(Engine {
            kind,
            dfa: dfa.clone(),
            repr,
        })
    }

    pub fn kind(&self) -> EngineKind {
        self.kind
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    /// Next-state circuits (sd-DNNF engines only).
    pub fn circuits(&self) -> Option<&[Circuit]> {
        match &self.repr {
            Repr::Sddnnf(cs) => Some(cs),
            _ => None,
        }
    }

    /// Simplified next-state formulas (fuzzy engines only).
    pub fn formulas(&self) -> Option<&[PropFormula]> {
        match &self.repr {
            Repr::Fuzzy(fs) => Some(fs),
            _ => None,
        }
    }

    pub fn initial(&self) -> BeliefState {
        BeliefState::one_hot(self.dfa.num_states(), self.dfa.initial())
    }

    fn check(&self, b: &BeliefState, cb: &[f64]) -> Result<()> {
        if b.0.len() != self.dfa.num_states() {
            return Err(Error::domain(format!(
                "belief has {} entries for {} states",
                b.0.len(),
                self.dfa.num_states()
            )));
        }
        if cb.len() != self.dfa.atoms().len() {
            return Err(Error::domain(format!(
                "constraint belief has {} entries for {} atoms",
                cb.len(),
                self.dfa.atoms().len()
            )));
        }
        let range = -MASS_TOLERANCE..=1.0 + MASS_TOLERANCE;
        if let Some(x) = b.0.iter().chain(cb).find(|x| !range.contains(*x)) {
            return Err(Error::domain(format!("probability {x} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn step(&self, b: &BeliefState, cb: &[f64]) -> Result<Step> {
        self.check(b, cb)?;
        match &self.repr {
            Repr::Exact => Ok(Step {
                belief: exact_step(&self.dfa, b, cb),
                mass: 1.0,
            }),
            Repr::Fuzzy(fs) => {
                let raw = if self.kind.log_space() {
                    self.eval_all(fs.len(), b, cb, &LogProbability, |i, w| fuzzy_eval(&fs[i], w, &LogProbability))?
                } else {
                    self.eval_all(fs.len(), b, cb, &Probability, |i, w| fuzzy_eval(&fs[i], w, &Probability))?
                };
                let (belief, mass) = raw.normalize()?;
                Ok(Step { belief, mass })
            }
            Repr::Sddnnf(cs) => {
                let raw = if self.kind.log_space() {
                    self.eval_all(cs.len(), b, cb, &LogProbability, |i, w| amc(&cs[i], w, &LogProbability))?
                } else {
                    self.eval_all(cs.len(), b, cb, &Probability, |i, w| amc(&cs[i], w, &Probability))?
                };
                // Raw counts: exact for one-hot beliefs; with soft beliefs the
                // multi-hot state encoding need not sum to 1.
                let mass = raw.mass();
                Ok(Step { belief: raw, mass })
            }
        }
    }

    /// Evaluates every target with multi-hot state weights and atom weights
    /// in semiring `s`, returning probabilities.
    fn eval_all<S: Semiring<Value = f64>>(
        &self,
        n: usize,
        b: &BeliefState,
        cb: &[f64],
        s: &S,
        f: impl Fn(usize, &LiteralWeights<f64>) -> Result<f64>,
    ) -> Result<BeliefState> {
        let m = self.dfa.num_states();
        let mut w = LiteralWeights::new();
        for (i, &p) in b.0.iter().enumerate() {
            let p = p.clamp(0.0, 1.0);
            w.set(state_var(i), s.from_probability(p), s.from_probability(1.0 - p));
        }
        for (i, &p) in cb.iter().enumerate() {
            let p = p.clamp(0.0, 1.0);
            w.set(atom_var(m, i), s.from_probability(p), s.from_probability(1.0 - p));
        }
        let log = self.kind.log_space();
        let out = (0..n)
            .map(|i| f(i, &w).map(|v| if log { v.exp() } else { v }))
            .collect::<Result<Vec<_>>>()?;
        Ok(BeliefState(out))
    }

    /// Runs the engine from the one-hot initial belief over a constraint
    /// belief trace.
    pub fn run_sequence(&self, cb_trace: &[Vec<f64>]) -> Result<Run> {
        if cb_trace.is_empty() {
            return Err(Error::domain("empty constraint belief trace"));
        }
        let mut b = self.initial();
        let mut beliefs = Vec::with_capacity(cb_trace.len());
        let mut masses = Vec::with_capacity(cb_trace.len());
        for cb in cb_trace {
            let step = self.step(&b, cb)?;
            b = step.belief;
            beliefs.push(b.clone());
            masses.push(step.mass);
        }
        let acceptance = self
            .dfa
            .accepting_states()
            .iter()
            .map(|&s| b.0[s])
            .sum::<f64>()
            .clamp(0.0, 1.0);
        Ok(Run {
            beliefs,
            masses,
            acceptance,
        })
    }
}

/// Exact belief update by letter enumeration with independent atoms.
pub fn exact_step(d: &Dfa, b: &BeliefState, cb: &[f64]) -> BeliefState {
    let mut out = vec![0.0; d.num_states()];
    for letter in 0..d.num_letters() as u32 {
        let w: f64 = cb
            .iter()
            .enumerate()
            .map(|(i, &p)| if letter >> i & 1 == 1 { p } else { 1.0 - p })
            .product();
        if w == 0.0 {
            continue;
        }
        for (s, &bs) in b.0.iter().enumerate() {
            if bs != 0.0 {
                out[d.next(s, letter)] += bs * w;
            }
        }
    }
    for x in &mut out {
        *x = x.clamp(0.0, 1.0);
    }
    BeliefState(out)
}
