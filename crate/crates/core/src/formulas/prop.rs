//! Propositional formulas over a countable alphabet of letters.
//!
//! Negation is not a primitive: `~p` is the derived form `p -> _|_`, so the
//! forcing clauses only ever deal with `&`, `|`, `->` and bottom.

use std::collections::BTreeSet;
use std::fmt;

use super::lexer::{Cursor, Tok};
use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropFormula {
    Bottom,
    Letter(String),
    And(Box<PropFormula>, Box<PropFormula>),
    Or(Box<PropFormula>, Box<PropFormula>),
    Implies(Box<PropFormula>, Box<PropFormula>),
}

impl PropFormula {
    pub fn letter(name: impl Into<String>) -> Self {
        PropFormula::Letter(name.into())
    }

    pub fn and(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: PropFormula, b: PropFormula) -> Self {
        PropFormula::Implies(Box::new(a), Box::new(b))
    }

    /// Derived negation, `a -> _|_`.
    pub fn neg(a: PropFormula) -> Self {
        PropFormula::implies(a, PropFormula::Bottom)
    }

    /// Right-fold conjunction; the empty conjunction is `_|_ -> _|_`.
    pub fn conj(parts: Vec<PropFormula>) -> Self {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => PropFormula::implies(PropFormula::Bottom, PropFormula::Bottom),
            Some(last) => it.fold(last, |acc, f| PropFormula::and(f, acc)),
        }
    }

    /// Right-fold disjunction; the empty disjunction is `_|_`.
    pub fn disj(parts: Vec<PropFormula>) -> Self {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => PropFormula::Bottom,
            Some(last) => it.fold(last, |acc, f| PropFormula::or(f, acc)),
        }
    }

    /// The finitely many distinct letters occurring in the formula.
    pub fn letters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut BTreeSet<String>) {
        match self {
            PropFormula::Bottom => {}
            PropFormula::Letter(p) => {
                out.insert(p.clone());
            }
            PropFormula::And(a, b) | PropFormula::Or(a, b) | PropFormula::Implies(a, b) => {
                a.collect_letters(out);
                b.collect_letters(out);
            }
        }
    }

    /// Connective nesting depth; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            PropFormula::Bottom | PropFormula::Letter(_) => 0,
            PropFormula::And(a, b) | PropFormula::Or(a, b) | PropFormula::Implies(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            PropFormula::Bottom | PropFormula::Letter(_) => 5,
            PropFormula::Implies(_, b) if **b == PropFormula::Bottom => 4, // printed as ~
            PropFormula::And(_, _) => 3,
            PropFormula::Or(_, _) => 2,
            PropFormula::Implies(_, _) => 1,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            PropFormula::Bottom => write!(f, "_|_")?,
            PropFormula::Letter(p) => write!(f, "{p}")?,
            PropFormula::Implies(a, b) if **b == PropFormula::Bottom => {
                write!(f, "~")?;
                a.fmt_prec(f, 5)?;
            }
            PropFormula::And(a, b) => {
                a.fmt_prec(f, 4)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 3)?;
            }
            PropFormula::Or(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 2)?;
            }
            PropFormula::Implies(a, b) => {
                a.fmt_prec(f, 2)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 1)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for PropFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Parse a propositional formula.
///
/// Grammar: `~` > `&` > `|` > `->`, with `->`, `&`, `|` right-associative;
/// `_|_` or `bot` denotes bottom.
pub fn parse_prop(text: &str) -> Result<PropFormula, ParseError> {
    let mut cur = Cursor::new(text)?;
    let f = implication(&mut cur)?;
    cur.finish()?;
    Ok(f)
}

fn implication(cur: &mut Cursor) -> Result<PropFormula, ParseError> {
    let lhs = disjunction(cur)?;
    if cur.peek() == Some(&Tok::Arrow) {
        cur.bump();
        let rhs = implication(cur)?;
        Ok(PropFormula::implies(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn disjunction(cur: &mut Cursor) -> Result<PropFormula, ParseError> {
    let lhs = conjunction(cur)?;
    if cur.peek() == Some(&Tok::Pipe) {
        cur.bump();
        let rhs = disjunction(cur)?;
        Ok(PropFormula::or(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn conjunction(cur: &mut Cursor) -> Result<PropFormula, ParseError> {
    let lhs = unary(cur)?;
    if cur.peek() == Some(&Tok::Amp) {
        cur.bump();
        let rhs = conjunction(cur)?;
        Ok(PropFormula::and(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn unary(cur: &mut Cursor) -> Result<PropFormula, ParseError> {
    match cur.peek() {
        Some(Tok::Tilde) => {
            cur.bump();
            let inner = unary(cur)?;
            Ok(PropFormula::neg(inner))
        }
        _ => primary(cur),
    }
}

fn primary(cur: &mut Cursor) -> Result<PropFormula, ParseError> {
    let pos = cur.pos();
    match cur.bump() {
        Some(Tok::Bottom) => Ok(PropFormula::Bottom),
        Some(Tok::Ident(name)) => Ok(PropFormula::Letter(name)),
        Some(Tok::LParen) => {
            let inner = implication(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(inner)
        }
        Some(t) => Err(ParseError::new(pos, format!("expected formula, found {}", t.describe()))),
        None => Err(ParseError::new(pos, "expected formula, found end of input")),
    }
}
