//! Recursive-descent parser for LTLf formulas.
//!
//! Precedence from tightest to loosest: unary operators (`!`, `X`, `WX`,
//! `F`, `G`), `U`/`R` (right associative), `&`, `|`, `->` (right
//! associative), `<->` (left associative). `◯`, `◇` and `□` are accepted as
//! aliases of `X`, `F` and `G`.

use super::formula::Formula;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    Next,
    WeakNext,
    Finally,
    Globally,
    Until,
    Release,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("atom `{name}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Ident(_) => "atom",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Not => "!",
            Tok::Next => "X",
            Tok::WeakNext => "WX",
            Tok::Finally => "F",
            Tok::Globally => "G",
            Tok::Until => "U",
            Tok::Release => "R",
            Tok::And => "&",
            Tok::Or => "|",
            Tok::Implies => "->",
            Tok::Iff => "<->",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Eof => "end of input",
        }
    }
}

/// Words that cannot be used as atom names.
pub const RESERVED: &[&str] = &["true", "false", "X", "WX", "F", "G", "U", "R"];

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let mut push = |tok: Tok, width: usize, i: &mut usize, column: &mut usize| {
            out.push(Spanned {
                tok,
                line: start_line,
                column: start_col,
            });
            *i += width;
            *column += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut column),
            ')' => push(Tok::RParen, 1, &mut i, &mut column),
            '!' => push(Tok::Not, 1, &mut i, &mut column),
            '&' => push(Tok::And, 1, &mut i, &mut column),
            '|' => push(Tok::Or, 1, &mut i, &mut column),
            '◯' => push(Tok::Next, 1, &mut i, &mut column),
            '◇' => push(Tok::Finally, 1, &mut i, &mut column),
            '□' => push(Tok::Globally, 1, &mut i, &mut column),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Implies, 2, &mut i, &mut column),
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::Iff, 3, &mut i, &mut column)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "WX" => Tok::WeakNext,
                    "F" => Tok::Finally,
                    "G" => Tok::Globally,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    _ => Tok::Ident(word),
                };
                push(tok, j - i, &mut i, &mut column);
            }
            other => {
                return Err(Error::UnknownToken {
                    line,
                    column,
                    token: other.to_string(),
                })
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> Error {
        let here = &self.toks[self.pos];
        Error::Syntax {
            line: here.line,
            column: here.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: here.tok.describe(),
        }
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut lhs = self.implies()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.temporal()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.temporal()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        match self.peek() {
            Tok::Until => {
                self.bump();
                Ok(Formula::until(lhs, self.temporal()?))
            }
            Tok::Release => {
                self.bump();
                Ok(Formula::release(lhs, self.temporal()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        let ctor: fn(Formula) -> Formula = match self.peek() {
            Tok::Not => Formula::not,
            Tok::Next => Formula::next,
            Tok::WeakNext => Formula::weak_next,
            Tok::Finally => Formula::finally,
            Tok::Globally => Formula::globally,
            _ => return self.primary(),
        };
        self.bump();
        Ok(ctor(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula> {
        const EXPECTED: &[&str] = &[
            "atom", "true", "false", "(", "!", "X", "WX", "F", "G",
        ];
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::atom(&name))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&[")", "&", "|", "->", "<->", "U", "R"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(EXPECTED)),
        }
    }
}

/// Parses LTLf formula text.
pub fn parse_ltlf(text: &str) -> Result<Formula> {
    let toks = tokenize(text)?;
    let mut parser = Parser { toks, pos: 0 };
    let formula = parser.iff()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.error(&["&", "|", "->", "<->", "U", "R", "end of input"]));
    }
    Ok(formula)
}
