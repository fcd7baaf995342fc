//! A small expression language for function-field elements.
//!
//! Grammar (usual precedence, `^` tightest, left-associative `*` `/` `+` `-`):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := '(' expr ')' | 'x' | 'y' | 'a' | integer
//! ```
//!
//! `x` and `y` are the coordinates of the curve model, `a` the chosen
//! generator of its constant field.  Integers reduce into the prime field.
//! The parser round-trips everything the renderers in this crate produce.

use std::sync::Arc;

use crate::curve::{CurveModel, FuncElt};
use crate::error::{Error, Result};

const MAX_EXPONENT: u64 = 4096;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(u64),
    X,
    Y,
    Gen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            'x' => {
                out.push(Tok::X);
                i += 1;
            }
            'y' => {
                out.push(Tok::Y);
                i += 1;
            }
            'a' => {
                out.push(Tok::Gen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let n: u64 = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("integer '{text}' out of range")))?;
                out.push(Tok::Int(n));
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character '{other}' at byte {i}"
                )));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    curve: &'a Arc<CurveModel>,
    toks: Vec<Tok>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.bump() {
            Some(ref got) if *got == t => Ok(()),
            Some(got) => Err(Error::Parse(format!("expected {t:?}, found {got:?}"))),
            None => Err(Error::Parse(format!("expected {t:?}, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<FuncElt> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<FuncElt> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = acc.mul(&self.unary()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    acc = acc.div(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<FuncElt> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<FuncElt> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            match self.bump() {
                Some(Tok::Int(e)) if e <= MAX_EXPONENT => Ok(base.pow(e)),
                Some(Tok::Int(e)) => {
                    Err(Error::Parse(format!("exponent {e} exceeds {MAX_EXPONENT}")))
                }
                other => Err(Error::Parse(format!(
                    "exponent must be a plain integer, found {other:?}"
                ))),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<FuncElt> {
        match self.bump() {
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::X) => Ok(FuncElt::x(self.curve)),
            Some(Tok::Y) => FuncElt::y(self.curve),
            Some(Tok::Gen) => {
                let field = self.curve.field();
                if field.degree() == 1 {
                    return Err(Error::Parse(
                        "'a' refers to the constant-field generator; this curve has a prime constant field".into(),
                    ));
                }
                Ok(FuncElt::constant(self.curve, field.gen()))
            }
            Some(Tok::Int(n)) => {
                let field = self.curve.field();
                Ok(FuncElt::constant(
                    self.curve,
                    field.from_int((n % field.p() as u64) as i64),
                ))
            }
            Some(other) => Err(Error::Parse(format!("unexpected token {other:?}"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }
}

/// Parse an expression into a function-field element on the given curve.
pub fn parse_func(curve: &Arc<CurveModel>, src: &str) -> Result<FuncElt> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut parser = Parser {
        curve,
        toks,
        pos: 0,
    };
    let f = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(Error::Parse(format!(
            "trailing input after position {}",
            parser.pos
        )));
    }
    Ok(f)
}
