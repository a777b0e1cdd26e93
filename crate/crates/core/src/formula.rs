//! Propositional formulas over boolean attributes.
//!
//! Text form is a prefix s-expression:
//!
//! ```text
//! (and (var 0) (not (or (var 1) false)))
//! ```
//!
//! `and`/`or` accept one or more operands. Variables index schema
//! attributes; a vector satisfies `(var i)` when its level at `i` is
//! nonzero.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BooleanFormula {
    Const(bool),
    Var(usize),
    Not(Box<BooleanFormula>),
    And(Vec<BooleanFormula>),
    Or(Vec<BooleanFormula>),
}

impl BooleanFormula {
    pub fn var(i: usize) -> Self {
        BooleanFormula::Var(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: BooleanFormula) -> Self {
        BooleanFormula::Not(Box::new(f))
    }

    pub fn and(a: BooleanFormula, b: BooleanFormula) -> Self {
        BooleanFormula::And(vec![a, b])
    }

    pub fn or(a: BooleanFormula, b: BooleanFormula) -> Self {
        BooleanFormula::Or(vec![a, b])
    }

    /// Evaluate against a truth assignment.
    ///
    /// Panics if a variable index is outside `assignment`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            BooleanFormula::Const(b) => *b,
            BooleanFormula::Var(i) => assignment[*i],
            BooleanFormula::Not(f) => !f.eval(assignment),
            BooleanFormula::And(fs) => fs.iter().all(|f| f.eval(assignment)),
            BooleanFormula::Or(fs) => fs.iter().any(|f| f.eval(assignment)),
        }
    }

    /// Evaluate against level indices; nonzero counts as true.
    pub fn eval_levels(&self, levels: &[u32]) -> bool {
        match self {
            BooleanFormula::Const(b) => *b,
            BooleanFormula::Var(i) => levels[*i] != 0,
            BooleanFormula::Not(f) => !f.eval_levels(levels),
            BooleanFormula::And(fs) => fs.iter().all(|f| f.eval_levels(levels)),
            BooleanFormula::Or(fs) => fs.iter().any(|f| f.eval_levels(levels)),
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            BooleanFormula::Const(_) => None,
            BooleanFormula::Var(i) => Some(*i),
            BooleanFormula::Not(f) => f.max_var(),
            BooleanFormula::And(fs) | BooleanFormula::Or(fs) => {
                fs.iter().filter_map(BooleanFormula::max_var).max()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            BooleanFormula::Const(_) | BooleanFormula::Var(_) => 1,
            BooleanFormula::Not(f) => 1 + f.depth(),
            BooleanFormula::And(fs) | BooleanFormula::Or(fs) => {
                1 + fs.iter().map(BooleanFormula::depth).max().unwrap_or(0)
            }
        }
    }
}

impl fmt::Display for BooleanFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BooleanFormula::Const(b) => write!(f, "{b}"),
            BooleanFormula::Var(i) => write!(f, "(var {i})"),
            BooleanFormula::Not(x) => write!(f, "(not {x})"),
            BooleanFormula::And(xs) | BooleanFormula::Or(xs) => {
                let op = if matches!(self, BooleanFormula::And(_)) {
                    "and"
                } else {
                    "or"
                };
                write!(f, "({op}")?;
                for x in xs {
                    write!(f, " {x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<(Token<'_>, usize)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut chars = text.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        match c {
            '\n' => line += 1,
            c if c.is_whitespace() => {}
            '(' => out.push((Token::Open, line)),
            ')' => out.push((Token::Close, line)),
            _ => {
                let mut end = start + c.len_utf8();
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    end = i + c.len_utf8();
                    chars.next();
                }
                out.push((Token::Atom(&text[start..end]), line));
            }
        }
    }
    out
}

struct Parser<'a> {
    tokens: Vec<(Token<'a>, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn line(&self) -> usize {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map_or(1, |t| t.1)
    }

    fn next(&mut self) -> Result<Token<'a>> {
        let tok = self
            .tokens
            .get(self.pos)
            .map(|t| t.0.clone())
            .ok_or_else(|| Error::parse(self.line(), "unexpected end of formula"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn expr(&mut self) -> Result<BooleanFormula> {
        match self.next()? {
            Token::Atom("true") => Ok(BooleanFormula::Const(true)),
            Token::Atom("false") => Ok(BooleanFormula::Const(false)),
            Token::Atom(a) => Err(Error::parse(self.line(), format!("unexpected atom `{a}`"))),
            Token::Close => Err(Error::parse(self.line(), "unexpected `)`")),
            Token::Open => {
                let op = match self.next()? {
                    Token::Atom(op) => op,
                    _ => return Err(Error::parse(self.line(), "expected an operator after `(`")),
                };
                let f = match op {
                    "var" => {
                        let line = self.line();
                        match self.next()? {
                            Token::Atom(n) => BooleanFormula::Var(n.parse().map_err(|_| {
                                Error::parse(line, format!("bad variable index `{n}`"))
                            })?),
                            _ => return Err(Error::parse(line, "expected a variable index")),
                        }
                    }
                    "not" => BooleanFormula::not(self.expr()?),
                    "and" | "or" => {
                        let mut args = Vec::new();
                        while !matches!(self.tokens.get(self.pos), Some((Token::Close, _)) | None) {
                            args.push(self.expr()?);
                        }
                        if args.is_empty() {
                            return Err(Error::parse(self.line(), format!("`{op}` needs operands")));
                        }
                        if op == "and" {
                            BooleanFormula::And(args)
                        } else {
                            BooleanFormula::Or(args)
                        }
                    }
                    other => {
                        return Err(Error::parse(self.line(), format!("unknown operator `{other}`")))
                    }
                };
                match self.next()? {
                    Token::Close => Ok(f),
                    _ => Err(Error::parse(self.line(), format!("expected `)` to close `{op}`"))),
                }
            }
        }
    }
}

impl FromStr for BooleanFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            tokens: tokenize(s),
            pos: 0,
        };
        let f = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::parse(p.line(), "trailing input after formula"));
        }
        Ok(f)
    }
}

impl Serialize for BooleanFormula {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BooleanFormula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}
