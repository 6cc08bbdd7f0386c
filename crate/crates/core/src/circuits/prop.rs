use std::collections::BTreeSet;
use std::fmt;

pub type Var = u32;

/// Propositional formula over numbered variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropFormula {
    True,
    False,
    Var(Var),
    Not(Box<PropFormula>),
    And(Vec<PropFormula>),
    Or(Vec<PropFormula>),
}

impl PropFormula {
    pub fn var(v: Var) -> Self {
        PropFormula::Var(v)
    }

    pub fn lit(v: Var, positive: bool) -> Self {
        if positive {
            PropFormula::Var(v)
        } else {
            PropFormula::Not(Box::new(PropFormula::Var(v)))
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: PropFormula) -> Self {
        PropFormula::Not(Box::new(f))
    }

    pub fn and(children: Vec<PropFormula>) -> Self {
        PropFormula::And(children)
    }

    pub fn or(children: Vec<PropFormula>) -> Self {
        PropFormula::Or(children)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            PropFormula::True | PropFormula::False => {}
            PropFormula::Var(v) => {
                out.insert(*v);
            }
            PropFormula::Not(a) => a.collect_vars(out),
            PropFormula::And(cs) | PropFormula::Or(cs) => {
                for c in cs {
                    c.collect_vars(out);
                }
            }
        }
    }

    pub fn eval(&self, value: &dyn Fn(Var) -> bool) -> bool {
        match self {
            PropFormula::True => true,
            PropFormula::False => false,
            PropFormula::Var(v) => value(*v),
            PropFormula::Not(a) => !a.eval(value),
            PropFormula::And(cs) => cs.iter().all(|c| c.eval(value)),
            PropFormula::Or(cs) => cs.iter().any(|c| c.eval(value)),
        }
    }

    /// The literal `(var, polarity)` this formula is, if any.
    pub fn as_literal(&self) -> Option<(Var, bool)> {
        match self {
            PropFormula::Var(v) => Some((*v, true)),
            PropFormula::Not(a) => match **a {
                PropFormula::Var(v) => Some((v, false)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn to_nnf(&self) -> PropFormula {
        self.nnf(true)
    }

    fn nnf(&self, positive: bool) -> PropFormula {
        match (self, positive) {
            (PropFormula::True, true) | (PropFormula::False, false) => PropFormula::True,
            (PropFormula::True, false) | (PropFormula::False, true) => PropFormula::False,
            (PropFormula::Var(v), p) => PropFormula::lit(*v, p),
            (PropFormula::Not(a), p) => a.nnf(!p),
            (PropFormula::And(cs), true) | (PropFormula::Or(cs), false) => {
                PropFormula::And(cs.iter().map(|c| c.nnf(positive)).collect())
            }
            (PropFormula::Or(cs), true) | (PropFormula::And(cs), false) => {
                PropFormula::Or(cs.iter().map(|c| c.nnf(positive)).collect())
            }
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            PropFormula::Not(a) => matches!(**a, PropFormula::Var(_)),
            PropFormula::And(cs) | PropFormula::Or(cs) => cs.iter().all(|c| c.is_nnf()),
            _ => true,
        }
    }

    /// Substitutes `var := value` and folds constants.
    pub fn condition(&self, var: Var, value: bool) -> PropFormula {
        match self {
            PropFormula::True | PropFormula::False => self.clone(),
            PropFormula::Var(v) if *v == var => {
                if value {
                    PropFormula::True
                } else {
                    PropFormula::False
                }
            }
            PropFormula::Var(_) => self.clone(),
            PropFormula::Not(a) => match a.condition(var, value) {
                PropFormula::True => PropFormula::False,
                PropFormula::False => PropFormula::True,
                other => PropFormula::not(other),
            },
            PropFormula::And(cs) => fold_junction(cs.iter().map(|c| c.condition(var, value)), true),
            PropFormula::Or(cs) => fold_junction(cs.iter().map(|c| c.condition(var, value)), false),
        }
    }

    /// Light normalization: flattening, constant folding, sorting and
    /// deduplication of operands. Used as the cache key during compilation.
    pub fn normalized(&self) -> PropFormula {
        match self {
            PropFormula::Not(a) => match a.normalized() {
                PropFormula::True => PropFormula::False,
                PropFormula::False => PropFormula::True,
                PropFormula::Not(inner) => *inner,
                other => PropFormula::not(other),
            },
            PropFormula::And(cs) => fold_junction(cs.iter().map(|c| c.normalized()), true),
            PropFormula::Or(cs) => fold_junction(cs.iter().map(|c| c.normalized()), false),
            _ => self.clone(),
        }
    }

    pub fn display_with<'a>(&'a self, names: &'a dyn Fn(Var) -> String) -> impl fmt::Display + 'a {
        Named { f: self, names }
    }
}

/// Builds a flattened, sorted, deduplicated conjunction (`is_and`) or
/// disjunction with constants folded away.
pub(crate) fn fold_junction(children: impl Iterator<Item = PropFormula>, is_and: bool) -> PropFormula {
    let (unit, zero) = if is_and {
        (PropFormula::True, PropFormula::False)
    } else {
        (PropFormula::False, PropFormula::True)
    };
    let mut flat = Vec::new();
    for c in children {
        match c {
            PropFormula::And(cs) if is_and => flat.extend(cs),
            PropFormula::Or(cs) if !is_and => flat.extend(cs),
            c if c == zero => return zero,
            c if c == unit => {}
            c => flat.push(c),
        }
    }
    flat.sort();
    flat.dedup();
    match flat.len() {
        0 => unit,
        1 => flat.pop().unwrap(),
        _ if is_and => PropFormula::And(flat),
        _ => PropFormula::Or(flat),
    }
}

struct Named<'a> {
    f: &'a PropFormula,
    names: &'a dyn Fn(Var) -> String,
}

impl<'a> Named<'a> {
    fn sub(&self, f: &'a PropFormula) -> Named<'a> {
        Named { f, names: self.names }
    }
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.f {
            PropFormula::True => write!(out, "true"),
            PropFormula::False => write!(out, "false"),
            PropFormula::Var(v) => write!(out, "{}", (self.names)(*v)),
            PropFormula::Not(a) => match **a {
                PropFormula::Var(_) => write!(out, "!{}", self.sub(a)),
                _ => write!(out, "!({})", self.sub(a)),
            },
            PropFormula::And(cs) | PropFormula::Or(cs) => {
                let op = if matches!(self.f, PropFormula::And(_)) { " & " } else { " | " };
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(out, "{op}")?;
                    }
                    match c {
                        PropFormula::And(_) | PropFormula::Or(_) => write!(out, "({})", self.sub(c))?,
                        _ => write!(out, "{}", self.sub(c))?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&|v| format!("x{v}")))
    }
}
