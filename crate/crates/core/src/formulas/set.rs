//! First-order formulas in the language of set theory.
//!
//! Atoms are membership and equality between variables; there are no terms.
//! Bounded quantifiers are derived forms: `forall x in a . f` parses to
//! `forall x . (x in a -> f)` and `exists x in a . f` to
//! `exists x . (x in a & f)`.

use std::collections::BTreeSet;
use std::fmt;

use super::lexer::{Cursor, Tok};
use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetFormula {
    Bottom,
    In(String, String),
    Eq(String, String),
    And(Box<SetFormula>, Box<SetFormula>),
    Or(Box<SetFormula>, Box<SetFormula>),
    Implies(Box<SetFormula>, Box<SetFormula>),
    Forall(String, Box<SetFormula>),
    Exists(String, Box<SetFormula>),
}

impl SetFormula {
    pub fn member(x: impl Into<String>, y: impl Into<String>) -> Self {
        SetFormula::In(x.into(), y.into())
    }

    pub fn eq(x: impl Into<String>, y: impl Into<String>) -> Self {
        SetFormula::Eq(x.into(), y.into())
    }

    pub fn and(a: SetFormula, b: SetFormula) -> Self {
        SetFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: SetFormula, b: SetFormula) -> Self {
        SetFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: SetFormula, b: SetFormula) -> Self {
        SetFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn neg(a: SetFormula) -> Self {
        SetFormula::implies(a, SetFormula::Bottom)
    }

    pub fn forall(x: impl Into<String>, body: SetFormula) -> Self {
        SetFormula::Forall(x.into(), Box::new(body))
    }

    pub fn exists(x: impl Into<String>, body: SetFormula) -> Self {
        SetFormula::Exists(x.into(), Box::new(body))
    }

    /// `forall x in a . body`, i.e. `forall x . (x in a -> body)`.
    pub fn forall_in(x: &str, a: &str, body: SetFormula) -> Self {
        SetFormula::forall(x, SetFormula::implies(SetFormula::member(x, a), body))
    }

    /// `exists x in a . body`, i.e. `exists x . (x in a & body)`.
    pub fn exists_in(x: &str, a: &str, body: SetFormula) -> Self {
        SetFormula::exists(x, SetFormula::and(SetFormula::member(x, a), body))
    }

    /// The fixed "true" form `_|_ -> _|_`.
    pub fn top() -> Self {
        SetFormula::implies(SetFormula::Bottom, SetFormula::Bottom)
    }

    /// Right-fold conjunction; empty conjunction is `top()`.
    pub fn conj(parts: Vec<SetFormula>) -> Self {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => SetFormula::top(),
            Some(last) => it.fold(last, |acc, f| SetFormula::and(f, acc)),
        }
    }

    /// Right-fold disjunction; empty disjunction is `_|_`.
    pub fn disj(parts: Vec<SetFormula>) -> Self {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => SetFormula::Bottom,
            Some(last) => it.fold(last, |acc, f| SetFormula::or(f, acc)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            SetFormula::Bottom => {}
            SetFormula::In(x, y) | SetFormula::Eq(x, y) => {
                for v in [x, y] {
                    if !bound.iter().any(|b| b == v) {
                        out.insert(v.clone());
                    }
                }
            }
            SetFormula::And(a, b) | SetFormula::Or(a, b) | SetFormula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            SetFormula::Forall(x, body) | SetFormula::Exists(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Maximal quantifier nesting.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            SetFormula::Bottom | SetFormula::In(_, _) | SetFormula::Eq(_, _) => 0,
            SetFormula::And(a, b) | SetFormula::Or(a, b) | SetFormula::Implies(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            SetFormula::Forall(_, body) | SetFormula::Exists(_, body) => {
                1 + body.quantifier_depth()
            }
        }
    }

    /// Rename bound variables to `x0`, `x1`, ... in traversal order, so that
    /// alpha-equivalent formulas become syntactically equal. Free variables
    /// keep their names; generated names skip any colliding free name.
    pub fn canonicalize(&self) -> SetFormula {
        let free = self.free_vars();
        let mut counter = 0usize;
        self.canon(&mut counter, &free, &mut Vec::new())
    }

    fn canon(
        &self,
        counter: &mut usize,
        free: &BTreeSet<String>,
        renames: &mut Vec<(String, String)>,
    ) -> SetFormula {
        let lookup = |v: &String, renames: &Vec<(String, String)>| -> String {
            renames
                .iter()
                .rev()
                .find(|(old, _)| old == v)
                .map(|(_, new)| new.clone())
                .unwrap_or_else(|| v.clone())
        };
        match self {
            SetFormula::Bottom => SetFormula::Bottom,
            SetFormula::In(x, y) => SetFormula::In(lookup(x, renames), lookup(y, renames)),
            SetFormula::Eq(x, y) => SetFormula::Eq(lookup(x, renames), lookup(y, renames)),
            SetFormula::And(a, b) => SetFormula::and(
                a.canon(counter, free, renames),
                b.canon(counter, free, renames),
            ),
            SetFormula::Or(a, b) => SetFormula::or(
                a.canon(counter, free, renames),
                b.canon(counter, free, renames),
            ),
            SetFormula::Implies(a, b) => SetFormula::implies(
                a.canon(counter, free, renames),
                b.canon(counter, free, renames),
            ),
            SetFormula::Forall(x, body) | SetFormula::Exists(x, body) => {
                let mut fresh;
                loop {
                    fresh = format!("x{counter}");
                    *counter += 1;
                    if !free.contains(&fresh) {
                        break;
                    }
                }
                renames.push((x.clone(), fresh.clone()));
                let inner = body.canon(counter, free, renames);
                renames.pop();
                match self {
                    SetFormula::Forall(_, _) => SetFormula::forall(fresh, inner),
                    _ => SetFormula::exists(fresh, inner),
                }
            }
        }
    }

    /// Canonical text: print of the canonicalized formula. Parsing it back
    /// yields exactly `self.canonicalize()`.
    pub fn canonical_string(&self) -> String {
        self.canonicalize().to_string()
    }

    fn precedence(&self) -> u8 {
        match self {
            SetFormula::Bottom | SetFormula::In(_, _) | SetFormula::Eq(_, _) => 6,
            SetFormula::Implies(_, b) if **b == SetFormula::Bottom => 5, // printed as ~
            SetFormula::And(_, _) => 4,
            SetFormula::Or(_, _) => 3,
            SetFormula::Implies(_, _) => 2,
            SetFormula::Forall(_, _) | SetFormula::Exists(_, _) => 1,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = self.precedence();
        let parens = prec < min;
        if parens {
            write!(f, "(")?;
        }
        match self {
            SetFormula::Bottom => write!(f, "_|_")?,
            SetFormula::In(x, y) => write!(f, "{x} in {y}")?,
            SetFormula::Eq(x, y) => write!(f, "{x} = {y}")?,
            SetFormula::Implies(a, b) if **b == SetFormula::Bottom => {
                write!(f, "~")?;
                a.fmt_prec(f, 6)?;
            }
            SetFormula::And(a, b) => {
                a.fmt_prec(f, 5)?;
                write!(f, " & ")?;
                b.fmt_prec(f, 4)?;
            }
            SetFormula::Or(a, b) => {
                a.fmt_prec(f, 4)?;
                write!(f, " | ")?;
                b.fmt_prec(f, 3)?;
            }
            SetFormula::Implies(a, b) => {
                a.fmt_prec(f, 3)?;
                write!(f, " -> ")?;
                b.fmt_prec(f, 2)?;
            }
            SetFormula::Forall(x, body) => {
                write!(f, "forall {x} . ")?;
                body.fmt_prec(f, 1)?;
            }
            SetFormula::Exists(x, body) => {
                write!(f, "exists {x} . ")?;
                body.fmt_prec(f, 1)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for SetFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Parse a formula in the language of set theory.
pub fn parse_set(text: &str) -> Result<SetFormula, ParseError> {
    let mut cur = Cursor::new(text)?;
    let f = formula(&mut cur)?;
    cur.finish()?;
    Ok(f)
}

fn formula(cur: &mut Cursor) -> Result<SetFormula, ParseError> {
    match cur.peek() {
        Some(Tok::Forall) | Some(Tok::Exists) => quantified(cur),
        _ => implication(cur),
    }
}

fn quantified(cur: &mut Cursor) -> Result<SetFormula, ParseError> {
    let universal = match cur.bump() {
        Some(Tok::Forall) => true,
        Some(Tok::Exists) => false,
        _ => unreachable!(),
    };
    let var = cur.expect_ident()?;
    let bound = if cur.peek() == Some(&Tok::In) {
        cur.bump();
        Some(cur.expect_ident()?)
    } else {
        None
    };
    cur.expect(&Tok::Dot)?;
    let body = formula(cur)?;
    Ok(match (universal, bound) {
        (true, None) => SetFormula::forall(var, body),
        (false, None) => SetFormula::exists(var, body),
        (true, Some(a)) => SetFormula::forall_in(&var, &a, body),
        (false, Some(a)) => SetFormula::exists_in(&var, &a, body),
    })
}

fn implication(cur: &mut Cursor) -> Result<SetFormula, ParseError> {
    let lhs = disjunction(cur)?;
    if cur.peek() == Some(&Tok::Arrow) {
        cur.bump();
        let rhs = formula(cur)?;
        Ok(SetFormula::implies(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn disjunction(cur: &mut Cursor) -> Result<SetFormula, ParseError> {
    let lhs = conjunction(cur)?;
    if cur.peek() == Some(&Tok::Pipe) {
        cur.bump();
        let rhs = disjunction(cur)?;
        Ok(SetFormula::or(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn conjunction(cur: &mut Cursor) -> Result<SetFormula, ParseError> {
    let lhs = unary(cur)?;
    if cur.peek() == Some(&Tok::Amp) {
        cur.bump();
        let rhs = conjunction(cur)?;
        Ok(SetFormula::and(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn unary(cur: &mut Cursor) -> Result<SetFormula, ParseError> {
    match cur.peek() {
        Some(Tok::Tilde) => {
            cur.bump();
            let inner = unary(cur)?;
            Ok(SetFormula::neg(inner))
        }
        _ => atom(cur),
    }
}

fn atom(cur: &mut Cursor) -> Result<SetFormula, ParseError> {
    let pos = cur.pos();
    match cur.bump() {
        Some(Tok::Bottom) => Ok(SetFormula::Bottom),
        Some(Tok::LParen) => {
            let inner = formula(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(inner)
        }
        Some(Tok::Ident(x)) => {
            let pos2 = cur.pos();
            match cur.bump() {
                Some(Tok::In) => {
                    let y = cur.expect_ident()?;
                    Ok(SetFormula::In(x, y))
                }
                Some(Tok::Equals) => {
                    let y = cur.expect_ident()?;
                    Ok(SetFormula::Eq(x, y))
                }
                Some(t) => Err(ParseError::new(
                    pos2,
                    format!("expected `in` or `=` after variable, found {}", t.describe()),
                )),
                None => Err(ParseError::new(pos2, "expected `in` or `=` after variable")),
            }
        }
        Some(t) => Err(ParseError::new(pos, format!("expected atom, found {}", t.describe()))),
        None => Err(ParseError::new(pos, "expected atom, found end of input")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_universal_desugars() {
        let f = parse_set("forall x in a . bot").unwrap();
        let expect = SetFormula::forall(
            "x",
            SetFormula::implies(SetFormula::member("x", "a"), SetFormula::Bottom),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn bounded_existential_desugars() {
        let f = parse_set("exists x in a . x = x").unwrap();
        let expect = SetFormula::exists(
            "x",
            SetFormula::and(SetFormula::member("x", "a"), SetFormula::eq("x", "x")),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn parses_plain_existential() {
        let f = parse_set("exists y . y = y").unwrap();
        assert_eq!(f, SetFormula::exists("y", SetFormula::eq("y", "y")));
    }

    #[test]
    fn parses_conjunction_of_memberships() {
        let f = parse_set("x in y & y in x").unwrap();
        assert_eq!(
            f,
            SetFormula::and(SetFormula::member("x", "y"), SetFormula::member("y", "x"))
        );
    }

    #[test]
    fn free_and_bound_variables() {
        let f = parse_set("forall x . x in a -> exists y . y = x").unwrap();
        let free = f.free_vars();
        assert_eq!(free.into_iter().collect::<Vec<_>>(), vec!["a".to_string()]);
        assert!(!f.is_sentence());
        assert!(parse_set("forall x . x = x").unwrap().is_sentence());
    }

    #[test]
    fn alpha_equivalent_formulas_share_canonical_form() {
        let f = parse_set("forall u . exists v . u in v").unwrap();
        let g = parse_set("forall a . exists b . a in b").unwrap();
        assert_eq!(f.canonical_string(), g.canonical_string());
        assert_eq!(f.canonical_string(), "forall x0 . exists x1 . x0 in x1");
    }

    #[test]
    fn canonical_renaming_avoids_free_name_capture() {
        let f = parse_set("forall y . y in x0").unwrap();
        let canon = f.canonicalize();
        assert_eq!(canon.to_string(), "forall x1 . x1 in x0");
        assert_eq!(canon.free_vars(), f.free_vars());
    }

    #[test]
    fn print_parse_is_identity_on_canonical_forms() {
        for text in [
            "forall x . x = x",
            "exists x . forall y . y in x -> _|_",
            "forall x in a . exists y in x . y = y",
            "~(exists x . x in x)",
            "(forall x . x = x) -> _|_",
            "x in y & (y = z | ~x in z)",
        ] {
            let f = parse_set(text).unwrap().canonicalize();
            let reparsed = parse_set(&f.to_string()).unwrap();
            assert_eq!(f, reparsed, "round trip failed for {text}");
        }
    }

    #[test]
    fn shadowed_binders_canonicalize_apart() {
        let f = parse_set("forall x . (exists x . x = x) & x in x").unwrap();
        let canon = f.canonicalize();
        assert_eq!(canon.to_string(), "forall x0 . (exists x1 . x1 = x1) & x0 in x0");
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse_set("forall x . x in a -> x = b").unwrap();
        match f {
            SetFormula::Forall(_, body) => {
                assert!(matches!(*body, SetFormula::Implies(_, _)));
            }
            other => panic!("unexpected parse: {other:?}"),
        }
    }
}
