use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// LTLf formula over named constraint atoms.
///
/// Children are reference counted so progression states can share
/// structure cheaply. The derived `Ord`/`Hash` give a canonical total order
/// used when normalizing conjunctions and disjunctions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(Arc<str>),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Next(Arc<Formula>),
    WeakNext(Arc<Formula>),
    Finally(Arc<Formula>),
    Globally(Arc<Formula>),
    Until(Arc<Formula>, Arc<Formula>),
    Release(Arc<Formula>, Arc<Formula>),
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Formula {
    /// Panics if `name` is not a valid identifier.
    pub fn atom(name: &str) -> Formula {
        assert!(is_identifier(name), "invalid atom name {name:?}");
        Formula::Atom(Arc::from(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Arc::new(a), Arc::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Arc::new(f))
    }

    pub fn weak_next(f: Formula) -> Formula {
        Formula::WeakNext(Arc::new(f))
    }

    pub fn finally(f: Formula) -> Formula {
        Formula::Finally(Arc::new(f))
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::Globally(Arc::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Arc::new(a), Arc::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Formula {
        Formula::Release(Arc::new(a), Arc::new(b))
    }

    pub fn children(&self) -> Vec<&Formula> {
        use Formula::*;
        match self {
            True | False | Atom(_) => vec![],
            Not(a) | Next(a) | WeakNext(a) | Finally(a) | Globally(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Until(a, b) | Release(a, b) => {
                vec![a, b]
            }
        }
    }

    /// Sorted, deduplicated atom names.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        if let Formula::Atom(name) = self {
            out.insert(name.to_string());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    fn precedence(&self) -> u8 {
        use Formula::*;
        match self {
            Iff(..) => 1,
            Implies(..) => 2,
            Or(..) => 3,
            And(..) => 4,
            Until(..) | Release(..) => 5,
            Not(_) | Next(_) | WeakNext(_) | Finally(_) | Globally(_) => 6,
            True | False | Atom(_) => 7,
        }
    }
}

impl fmt::Display for Formula {
    /// Prints in the concrete syntax accepted by [`crate::ltlf::parse_ltlf`].
    ///
    /// Every binary operand that is itself compound is parenthesized, so
    /// parsing the output reproduces the tree exactly regardless of
    /// associativity.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        let operand = |f: &mut fmt::Formatter<'_>, child: &Formula, min: u8| {
            if child.precedence() >= min {
                write!(f, "{child}")
            } else {
                write!(f, "({child})")
            }
        };
        match self {
            True => write!(f, "true"),
            False => write!(f, "false"),
            Atom(name) => write!(f, "{name}"),
            Not(a) | Next(a) | WeakNext(a) | Finally(a) | Globally(a) => {
                let op = match self {
                    Not(_) => "!",
                    Next(_) => "X ",
                    WeakNext(_) => "WX ",
                    Finally(_) => "F ",
                    _ => "G ",
                };
                write!(f, "{op}")?;
                operand(f, a, 6)
            }
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Until(a, b) | Release(a, b) => {
                let op = match self {
                    And(..) => "&",
                    Or(..) => "|",
                    Implies(..) => "->",
                    Iff(..) => "<->",
                    Until(..) => "U",
                    _ => "R",
                };
                operand(f, a, 6)?;
                write!(f, " {op} ")?;
                operand(f, b, 6)
            }
        }
    }
}
