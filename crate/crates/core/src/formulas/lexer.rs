//! Token stream shared by the propositional and set-theoretic parsers.

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Bottom,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Dot,
    Equals,
    Forall,
    Exists,
    In,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Bottom => "`_|_`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Forall => "`forall`".into(),
            Tok::Exists => "`exists`".into(),
            Tok::In => "`in`".into(),
        }
    }
}

/// A token together with its byte offset in the source text.
pub(crate) struct Spanned {
    pub tok: Tok,
    pub pos: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                out.push(Spanned { tok: Tok::LParen, pos: i });
                i += 1;
            }
            b')' => {
                out.push(Spanned { tok: Tok::RParen, pos: i });
                i += 1;
            }
            b'.' => {
                out.push(Spanned { tok: Tok::Dot, pos: i });
                i += 1;
            }
            b'=' => {
                out.push(Spanned { tok: Tok::Equals, pos: i });
                i += 1;
            }
            b'~' => {
                out.push(Spanned { tok: Tok::Tilde, pos: i });
                i += 1;
            }
            b'&' => {
                out.push(Spanned { tok: Tok::Amp, pos: i });
                i += 1;
            }
            b'|' => {
                out.push(Spanned { tok: Tok::Pipe, pos: i });
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push(Spanned { tok: Tok::Arrow, pos: i });
                    i += 2;
                } else {
                    return Err(ParseError::new(i, "expected `->`"));
                }
            }
            b'_' => {
                if bytes.get(i + 1) == Some(&b'|') && bytes.get(i + 2) == Some(&b'_') {
                    out.push(Spanned { tok: Tok::Bottom, pos: i });
                    i += 3;
                } else {
                    return Err(ParseError::new(i, "expected `_|_`"));
                }
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "bot" => Tok::Bottom,
                    "forall" => Tok::Forall,
                    "exists" => Tok::Exists,
                    "in" => Tok::In,
                    _ => Tok::Ident(word.to_string()),
                };
                out.push(Spanned { tok, pos: start });
            }
            _ => {
                return Err(ParseError::new(
                    i,
                    format!("unexpected character `{}`", text[i..].chars().next().unwrap()),
                ))
            }
        }
    }
    Ok(out)
}

/// Cursor over a token stream with single-token lookahead.
pub(crate) struct Cursor {
    toks: Vec<Spanned>,
    pub idx: usize,
    len: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self, ParseError> {
        let toks = tokenize(text)?;
        Ok(Cursor { toks, idx: 0, len: text.len() })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|s| &s.tok)
    }

    pub(crate) fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|s| s.pos).unwrap_or(self.len)
    }

    pub(crate) fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|s| s.tok.clone());
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    pub(crate) fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.idx += 1;
                Ok(())
            }
            Some(t) => Err(ParseError::new(
                self.pos(),
                format!("expected {}, found {}", want.describe(), t.describe()),
            )),
            None => Err(ParseError::new(
                self.pos(),
                format!("expected {}, found end of input", want.describe()),
            )),
        }
    }

    pub(crate) fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.bump() {
                Some(Tok::Ident(s)) => Ok(s),
                _ => unreachable!(),
            },
            Some(t) => Err(ParseError::new(
                self.pos(),
                format!("expected identifier, found {}", t.describe()),
            )),
            None => Err(ParseError::new(self.pos(), "expected identifier, found end of input")),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(ParseError::new(
                self.pos(),
                format!("unexpected trailing {}", t.describe()),
            )),
        }
    }
}
