//! ASTs, parsers, printers and substitution for the propositional language
//! and the first-order language of set theory.

mod lexer;
mod ordinal;
mod prop;
mod set;
mod subst;

use thiserror::Error;

pub use ordinal::{ord_formula, ordinal_sentence};
pub use prop::{parse_prop, PropFormula};
pub use set::{parse_set, SetFormula};
pub use subst::{apply_substitution, SubstError, Substitution};

/// Syntax error with the byte position of the offending token.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at byte {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(pos: usize, message: impl Into<String>) -> Self {
        ParseError { pos, message: message.into() }
    }
}
