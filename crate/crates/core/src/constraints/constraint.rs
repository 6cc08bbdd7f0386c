use std::collections::BTreeMap;
use std::fmt;

use super::domain::{VariableAssignment, VariableSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Ge => a >= b,
            CmpOp::Gt => a > b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }
}

/// `Σ coeff·var + constant`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinExpr {
    pub terms: Vec<(i64, String)>,
    pub constant: i64,
}

impl LinExpr {
    pub fn eval(&self, value: &dyn Fn(&str) -> Option<i64>) -> Option<i64> {
        let mut total = self.constant;
        for (c, v) in &self.terms {
            total += c * value(v)?;
        }
        Some(total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintBody {
    Compare { lhs: LinExpr, op: CmpOp, rhs: LinExpr },
    AllDifferent(Vec<String>),
    AllEqual(Vec<String>),
}

/// A named relational constraint; its name is the LTLf atom it grounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub body: ConstraintBody,
}

impl Constraint {
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        Ok(Constraint {
            name: name.to_string(),
            body: parse_body(text)?,
        })
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut push = |v: &String| {
            if !out.contains(v) {
                out.push(v.clone());
            }
        };
        match &self.body {
            ConstraintBody::Compare { lhs, rhs, .. } => {
                lhs.terms.iter().chain(&rhs.terms).for_each(|(_, v)| push(v))
            }
            ConstraintBody::AllDifferent(vs) | ConstraintBody::AllEqual(vs) => vs.iter().for_each(push),
        }
        out
    }

    /// Truth under `value`; `None` if a variable is unbound.
    pub fn holds(&self, value: &dyn Fn(&str) -> Option<i64>) -> Option<bool> {
        Some(match &self.body {
            ConstraintBody::Compare { lhs, op, rhs } => op.holds(lhs.eval(value)?, rhs.eval(value)?),
            ConstraintBody::AllDifferent(vs) => {
                let vals = vs.iter().map(|v| value(v)).collect::<Option<Vec<_>>>()?;
                (0..vals.len()).all(|i| (i + 1..vals.len()).all(|j| vals[i] != vals[j]))
            }
            ConstraintBody::AllEqual(vs) => {
                let vals = vs.iter().map(|v| value(v)).collect::<Option<Vec<_>>>()?;
                vals.windows(2).all(|w| w[0] == w[1])
            }
        })
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, v) in &self.terms {
            let (sign, mag) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            match (first, sign) {
                (true, "-") => write!(f, "-")?,
                (true, _) => {}
                (false, s) => write!(f, " {s} ")?,
            }
            if mag == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}*{v}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant != 0 {
            let sign = if self.constant < 0 { "-" } else { "+" };
            write!(f, " {sign} {}", self.constant.abs())
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for ConstraintBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintBody::Compare { lhs, op, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
            ConstraintBody::AllDifferent(vs) => write!(f, "all_different({})", vs.join(", ")),
            ConstraintBody::AllEqual(vs) => write!(f, "all_equal({})", vs.join(", ")),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.body)
    }
}

/// Checked evaluation: every variable must be bound to an in-domain value.
pub fn eval_constraint(c: &Constraint, vars: &[VariableSpec], a: &VariableAssignment) -> Result<bool> {
    for name in c.variables() {
        let spec = vars
            .iter()
            .find(|v| v.name == name)
            .ok_or_else(|| Error::domain(format!("constraint `{}` uses undeclared variable `{name}`", c.name)))?;
        let value = *a
            .get(&name)
            .ok_or_else(|| Error::domain(format!("variable `{name}` is unassigned")))?;
        if !spec.domain.contains(value) {
            return Err(Error::domain(format!(
                "value {value} of `{name}` is outside domain `{}`",
                spec.domain.name()
            )));
        }
    }
    Ok(c.holds(&|v| a.get(v).copied()).expect("all variables bound"))
}

/// A constraint over variable positions, for fast repeated evaluation.
#[derive(Debug, Clone)]
pub(crate) enum Indexed {
    Linear { coeffs: Vec<(i64, usize)>, constant: i64, op: CmpOp },
    AllDifferent(Vec<usize>),
    AllEqual(Vec<usize>),
}

impl Indexed {
    /// `lhs - rhs op 0`, with coefficients merged per variable and zero
    /// coefficients dropped.
    pub(crate) fn new(c: &Constraint, names: &[String]) -> Result<Self> {
        let pos = |v: &String| {
            names
                .iter()
                .position(|n| n == v)
                .ok_or_else(|| Error::domain(format!("constraint `{}` uses undeclared variable `{v}`", c.name)))
        };
        Ok(match &c.body {
            ConstraintBody::Compare { lhs, op, rhs } => {
                let mut merged: BTreeMap<usize, i64> = BTreeMap::new();
                for (k, v) in &lhs.terms {
                    *merged.entry(pos(v)?).or_default() += k;
                }
                for (k, v) in &rhs.terms {
                    *merged.entry(pos(v)?).or_default() -= k;
                }
                Indexed::Linear {
                    coeffs: merged.into_iter().filter(|&(_, k)| k != 0).map(|(i, k)| (k, i)).collect(),
                    constant: lhs.constant - rhs.constant,
                    op: *op,
                }
            }
            ConstraintBody::AllDifferent(vs) => Indexed::AllDifferent(vs.iter().map(pos).collect::<Result<_>>()?),
            ConstraintBody::AllEqual(vs) => Indexed::AllEqual(vs.iter().map(pos).collect::<Result<_>>()?),
        })
    }

    pub(crate) fn holds(&self, values: &[i64]) -> bool {
        match self {
            Indexed::Linear { coeffs, constant, op } => {
                let s: i64 = coeffs.iter().map(|&(k, i)| k * values[i]).sum::<i64>() + constant;
                op.holds(s, 0)
            }
            Indexed::AllDifferent(ix) => {
                (0..ix.len()).all(|i| (i + 1..ix.len()).all(|j| values[ix[i]] != values[ix[j]]))
            }
            Indexed::AllEqual(ix) => ix.windows(2).all(|w| values[w[0]] == values[w[1]]),
        }
    }

    pub(crate) fn positions(&self) -> Vec<usize> {
        let mut out: Vec<usize> = match self {
            Indexed::Linear { coeffs, .. } => coeffs.iter().map(|&(_, i)| i).collect(),
            Indexed::AllDifferent(ix) | Indexed::AllEqual(ix) => ix.clone(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}

// ---- parsing ----

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Cmp(CmpOp),
    End,
}

fn err(text: &str, col: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        location: format!("column {} of `{text}`", col + 1),
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let tok = match c {
            _ if c.is_whitespace() => {
                i += 1;
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            _ if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| err(text, start, "integer literal too large"))?;
                out.push((Tok::Int(n), start));
                continue;
            }
            _ if two == "<=" => Tok::Cmp(CmpOp::Le),
            _ if two == ">=" => Tok::Cmp(CmpOp::Ge),
            _ if two == "!=" => Tok::Cmp(CmpOp::Ne),
            _ if two == "==" => Tok::Cmp(CmpOp::Eq),
            '<' => Tok::Cmp(CmpOp::Lt),
            '>' => Tok::Cmp(CmpOp::Gt),
            '=' => Tok::Cmp(CmpOp::Eq),
            '≤' => Tok::Cmp(CmpOp::Le),
            '≥' => Tok::Cmp(CmpOp::Ge),
            '≠' => Tok::Cmp(CmpOp::Ne),
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            other => return Err(err(text, start, format!("unexpected character `{other}`"))),
        };
        i += if matches!(two.as_str(), "<=" | ">=" | "!=" | "==") { 2 } else { 1 };
        out.push((tok, start));
    }
    out.push((Tok::End, chars.len()));
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: &str) -> Result<T> {
        Err(err(self.text, self.toks[self.pos].1, message))
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(&format!("expected {what}"))
        }
    }

    fn var_list(&mut self) -> Result<Vec<String>> {
        self.expect(Tok::LParen, "`(`")?;
        let bracket = *self.peek() == Tok::LBracket;
        if bracket {
            self.bump();
        }
        let mut vars = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Ident(v) => {
                    self.bump();
                    vars.push(v);
                }
                _ => return self.fail("expected a variable name"),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        if bracket {
            self.expect(Tok::RBracket, "`]`")?;
        }
        self.expect(Tok::RParen, "`)`")?;
        if vars.len() < 2 {
            return self.fail("global constraints need at least two variables");
        }
        Ok(vars)
    }

    fn linear(&mut self) -> Result<LinExpr> {
        let mut e = LinExpr::default();
        let mut sign = 1;
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = -1;
        }
        loop {
            self.term(sign, &mut e)?;
            match self.peek() {
                Tok::Plus => sign = 1,
                Tok::Minus => sign = -1,
                _ => return Ok(e),
            }
            self.bump();
        }
    }

    /// `factor ('*' factor)*` with at most one variable factor.
    fn term(&mut self, sign: i64, e: &mut LinExpr) -> Result<()> {
        let mut coeff = sign;
        let mut var: Option<String> = None;
        loop {
            match self.peek().clone() {
                Tok::Int(n) => coeff *= n,
                Tok::Ident(v) if var.is_none() => var = Some(v),
                Tok::Ident(_) => return self.fail("non-linear term"),
                Tok::LParen => return self.fail("parentheses are not supported in linear expressions"),
                _ => return self.fail("expected a variable or an integer"),
            }
            self.bump();
            if *self.peek() == Tok::Star {
                self.bump();
            } else {
                break;
            }
        }
        match var {
            Some(v) => e.terms.push((coeff, v)),
            None => e.constant += coeff,
        }
        Ok(())
    }
}

fn parse_body(text: &str) -> Result<ConstraintBody> {
    let mut p = Parser {
        text,
        toks: tokenize(text)?,
        pos: 0,
    };
    let body = match (p.toks[0].0.clone(), p.toks.get(1).map(|t| &t.0)) {
        (Tok::Ident(name), Some(Tok::LParen)) if name == "all_different" || name == "alldifferent" => {
            p.bump();
            ConstraintBody::AllDifferent(p.var_list()?)
        }
        (Tok::Ident(name), Some(Tok::LParen)) if name == "all_equal" || name == "allequal" => {
            p.bump();
            ConstraintBody::AllEqual(p.var_list()?)
        }
        (Tok::Ident(name), Some(Tok::LParen)) => {
            return p.fail(&format!("unknown global constraint `{name}`"));
        }
        _ => {
            let lhs = p.linear()?;
            let op = match *p.peek() {
                Tok::Cmp(op) => op,
                _ => return p.fail("expected a comparison operator"),
            };
            p.bump();
            let rhs = p.linear()?;
            ConstraintBody::Compare { lhs, op, rhs }
        }
    };
    if *p.peek() != Tok::End {
        return p.fail("unexpected trailing input");
    }
    Ok(body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::domain::SymbolicDomain;
    use std::sync::Arc;

    fn digits(names: &[&str]) -> Vec<VariableSpec> {
        let d = Arc::new(SymbolicDomain::from_range("digit", 0, 9).unwrap());
        names.iter().map(|n| VariableSpec::new(n, d.clone(), None)).collect()
    }

    fn assign(pairs: &[(&str, i64)]) -> VariableAssignment {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn sum_constraint() {
        let c = Constraint::parse("p", "A + B = C").unwrap();
        let vars = digits(&["A", "B", "C"]);
        assert!(eval_constraint(&c, &vars, &assign(&[("A", 0), ("B", 8), ("C", 8)])).unwrap());
        assert!(!eval_constraint(&c, &vars, &assign(&[("A", 1), ("B", 8), ("C", 8)])).unwrap());
    }

    #[test]
    fn globals() {
        let vars = digits(&["A", "B", "C"]);
        let ad = Constraint::parse("q", "all_different(A,B,C)").unwrap();
        assert!(eval_constraint(&ad, &vars, &assign(&[("A", 3), ("B", 1), ("C", 5)])).unwrap());
        let ae = Constraint::parse("q", "all_equal([A, B, C])").unwrap();
        assert!(eval_constraint(&ae, &vars, &assign(&[("A", 5), ("B", 5), ("C", 5)])).unwrap());
        assert!(!eval_constraint(&ae, &vars, &assign(&[("A", 5), ("B", 4), ("C", 5)])).unwrap());
    }

    #[test]
    fn coefficients_and_operators() {
        let c = Constraint::parse("q", "X + Y = 2*Z").unwrap();
        assert_eq!(
            c.body,
            ConstraintBody::Compare {
                lhs: LinExpr { terms: vec![(1, "X".into()), (1, "Y".into())], constant: 0 },
                op: CmpOp::Eq,
                rhs: LinExpr { terms: vec![(2, "Z".into())], constant: 0 },
            }
        );
        for (text, op) in [("X<Y", CmpOp::Lt), ("X ≤ Y", CmpOp::Le), ("X == Y", CmpOp::Eq), ("X≠Y", CmpOp::Ne), ("X >= Y", CmpOp::Ge), ("X>Y", CmpOp::Gt)] {
            match Constraint::parse("p", text).unwrap().body {
                ConstraintBody::Compare { op: got, .. } => assert_eq!(got, op, "{text}"),
                other => panic!("{other:?}"),
            }
        }
        let d = Constraint::parse("p", "-X + 3 - Y*2 >= 1").unwrap();
        assert_eq!(d.to_string(), "-X - 2*Y + 3 >= 1");
    }

    #[test]
    fn display_round_trips() {
        for text in ["X < Y + Z", "W + X = Y + Z", "all_different(X, Y, Z)", "2*X - 3 != Y"] {
            let c = Constraint::parse("p", text).unwrap();
            assert_eq!(Constraint::parse("p", &c.to_string()).unwrap(), c);
        }
    }

    #[test]
    fn malformed() {
        for text in ["X <", "X * Y = 1", "foo(X, Y)", "X = Y )", "all_different(X)", "X $ Y", ""] {
            assert!(matches!(Constraint::parse("p", text), Err(Error::Parse { .. })), "{text}");
        }
    }

    #[test]
    fn domain_errors() {
        let c = Constraint::parse("p", "A < B").unwrap();
        let vars = digits(&["A", "B"]);
        assert!(eval_constraint(&c, &vars, &assign(&[("A", 1)])).is_err());
        assert!(eval_constraint(&c, &vars, &assign(&[("A", 1), ("B", 10)])).is_err());
        assert!(eval_constraint(&c, &digits(&["A"]), &assign(&[("A", 1), ("B", 2)])).is_err());
    }

    #[test]
    fn indexed_merges_coefficients() {
        let c = Constraint::parse("p", "X + Y = X + 2").unwrap();
        let ix = Indexed::new(&c, &["X".into(), "Y".into()]).unwrap();
        assert_eq!(ix.positions(), vec![1]);
        assert!(ix.holds(&[7, 2]));
        assert!(!ix.holds(&[7, 3]));
    }
}
