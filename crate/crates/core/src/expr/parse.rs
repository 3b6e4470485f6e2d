//! Expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ['^' factor]                  (right-associative)
//! atom   := number | ident | ident '(' expr (',' expr)* ')'
//!         | '(' expr ')' | '-' atom
//! number := integer | decimal | 'p/q'
//! ```
//!
//! Whitespace is insignificant. Decimals are read exactly (`0.5` is the
//! rational `1/2`), and `p/q` literals are exact because division of
//! integer atoms folds to a rational during normalization; `x^1/2`
//! therefore reads as `(x^1)/2`, and fractional exponents need
//! parentheses. Identifiers not naming a builtin, when applied, become
//! opaque function applications. The parsed tree is normalized before
//! it is returned.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::pow::pow;

use super::{Builtin, Expr, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{} at offset {}", self.message, self.offset)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Dec(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut lx = Lexer {
            src: src.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            if lx.pos >= lx.src.len() {
                return Ok(out);
            }
            let start = lx.pos;
            let c = lx.src[lx.pos];
            let tok = match c {
                b'+' => {
                    lx.pos += 1;
                    Tok::Plus
                }
                b'-' => {
                    lx.pos += 1;
                    Tok::Minus
                }
                b'*' => {
                    lx.pos += 1;
                    Tok::Star
                }
                b'/' => {
                    lx.pos += 1;
                    Tok::Slash
                }
                b'^' => {
                    lx.pos += 1;
                    Tok::Caret
                }
                b'(' => {
                    lx.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    lx.pos += 1;
                    Tok::RParen
                }
                b',' => {
                    lx.pos += 1;
                    Tok::Comma
                }
                b'0'..=b'9' => lx.number()?,
                c if c == b'_' || c.is_ascii_alphabetic() => lx.ident(),
                other => {
                    return Err(ParseError {
                        offset: start,
                        message: format!("unknown operator or character '{}'", other as char),
                    })
                }
            };
            out.push((tok, start));
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Result<Tok, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let int_part = &self.src[start..self.pos];
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            let frac_start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == frac_start {
                return Err(ParseError {
                    offset: self.pos.saturating_sub(1),
                    message: "decimal point must be followed by digits".to_string(),
                });
            }
            let frac = &self.src[frac_start..self.pos];
            let digits: String = core::str::from_utf8(int_part)
                .unwrap()
                .chars()
                .chain(core::str::from_utf8(frac).unwrap().chars())
                .collect();
            let numer: BigInt = digits.parse().unwrap();
            let denom = pow(BigInt::from(10), frac.len());
            return Ok(Tok::Dec(Rational::new(numer, denom)));
        }
        let digits = core::str::from_utf8(int_part).unwrap();
        Ok(Tok::Int(digits.parse().unwrap()))
    }

    fn ident(&mut self) -> Tok {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos] == b'_' || self.src[self.pos].is_ascii_alphanumeric())
        {
            self.pos += 1;
        }
        Tok::Ident(
            core::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .to_string(),
        )
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn err<T>(&self, message: &str) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            message: message.to_string(),
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = alloc::vec![self.term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(Expr::Neg(alloc::boxed::Box::new(t)));
                }
                _ => break,
            }
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = alloc::vec![self.factor()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    factors.push(self.factor()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let f = self.factor()?;
                    factors.push(Expr::pow_i(f, -1));
                }
                _ => break,
            }
        }
        Ok(Expr::product(factors))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                let a = self.atom()?;
                Ok(Expr::Neg(alloc::boxed::Box::new(a)))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => {
                        self.pos -= 1;
                        self.err("expected ')'")
                    }
                }
            }
            Some(Tok::Int(_)) => match self.bump() {
                Some(Tok::Int(n)) => Ok(Expr::Rational(Rational::from_integer(n))),
                _ => unreachable!(),
            },
            Some(Tok::Dec(_)) => match self.bump() {
                Some(Tok::Dec(r)) => Ok(Expr::Rational(r)),
                _ => unreachable!(),
            },
            Some(Tok::Ident(_)) => {
                let name = match self.bump() {
                    Some(Tok::Ident(n)) => n,
                    _ => unreachable!(),
                };
                if matches!(self.peek(), Some(Tok::LParen)) {
                    self.bump();
                    let mut args = alloc::vec![self.expr()?];
                    loop {
                        match self.bump() {
                            Some(Tok::RParen) => break,
                            Some(Tok::Comma) => args.push(self.expr()?),
                            _ => {
                                self.pos -= 1;
                                return self.err("expected ',' or ')' in argument list");
                            }
                        }
                    }
                    if let Some(b) = Builtin::from_name(&name) {
                        if args.len() != 1 {
                            return self.err("builtin functions take exactly one argument");
                        }
                        return Ok(Expr::builtin(b, args.into_iter().next().unwrap()));
                    }
                    Ok(Expr::opaque(&name, args))
                } else {
                    Ok(Expr::sym(&name))
                }
            }
            _ => self.err("expected expression"),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.len(),
    };
    let raw = p.expr()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    raw.normalize().map_err(|e| ParseError {
        offset: 0,
        message: e.to_string(),
    })
}
