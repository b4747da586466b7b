//! Text syntax for phase-space polynomials.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/')? unary)*      juxtaposition multiplies
//! unary   := '-' unary | power
//! power   := atom ('^' integer)?
//! atom    := number | 'x' | 'p' | 'hbar' | 'ℏ' | 'sqrt2' | '(' expr ')'
//! number  := digits ('.' digits)?
//! ```
//!
//! Division is only allowed by nonzero ℏ-free constants, so `x^2/(2*sqrt2)`
//! parses and `x/hbar` does not. Examples: `3/2 * hbar^2 * x^2 p^2`,
//! `(p^2/2 + x^2/2)^2 - hbar^2/4`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::exact::{HbarPoly, Rational, Surd};
use super::poly::PolynomialXP;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => {
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push((
                    pos,
                    match c {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '/' => Tok::Slash,
                        '^' => Tok::Caret,
                        '(' => Tok::LParen,
                        _ => Tok::RParen,
                    },
                ));
                i += 1;
            }
            'ℏ' => {
                out.push((pos, Tok::Ident("hbar".into())));
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let mut frac = String::new();
                if i < chars.len() && chars[i].1 == '.' {
                    i += 1;
                    while i < chars.len() && chars[i].1.is_ascii_digit() {
                        frac.push(chars[i].1);
                        i += 1;
                    }
                }
                let int_part: String = chars[start..i]
                    .iter()
                    .map(|(_, c)| *c)
                    .take_while(|c| *c != '.')
                    .collect();
                if int_part.is_empty() && frac.is_empty() {
                    return Err(err(pos, "malformed number"));
                }
                let digits = format!("{int_part}{frac}");
                let num: BigInt = digits.parse().map_err(|_| err(pos, "malformed number"))?;
                let den = BigInt::from(10u32).pow(frac.len() as u32);
                out.push((pos, Tok::Num(Rational::new(num, den))));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().map(|(_, c)| *c).collect();
                match word.as_str() {
                    "x" | "p" | "hbar" | "sqrt2" => out.push((pos, Tok::Ident(word))),
                    _ => return Err(err(pos, format!("unknown symbol '{word}'"))),
                }
            }
            other => return Err(err(pos, format!("unexpected character '{other}'"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn expr(&mut self) -> Result<PolynomialXP> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<PolynomialXP> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let pos = self.pos();
                    let d = self.unary()?;
                    acc = divide(&acc, &d).ok_or_else(|| {
                        err(pos, "division is only defined by nonzero hbar-free constants")
                    })?;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = &acc * &self.unary()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<PolynomialXP> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<PolynomialXP> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some(Tok::Num(r)) if r.is_integer() && r >= Rational::zero() => {
                    let e: u32 = r
                        .to_integer()
                        .try_into()
                        .map_err(|_| err(pos, "exponent too large"))?;
                    if e > 64 {
                        return Err(err(pos, "exponent too large"));
                    }
                    Ok(base.pow(e))
                }
                _ => Err(err(pos, "exponent must be a non-negative integer")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<PolynomialXP> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(r)) => Ok(PolynomialXP::constant(Surd::from_rational(r))),
            Some(Tok::Ident(w)) => Ok(match w.as_str() {
                "x" => PolynomialXP::x(),
                "p" => PolynomialXP::p(),
                "hbar" => PolynomialXP::hbar(),
                _ => PolynomialXP::constant(Surd::sqrt2()),
            }),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let close = self.pos();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(err(close, "expected ')'")),
                }
            }
            Some(t) => Err(err(pos, format!("unexpected token {t:?}"))),
            None => Err(err(pos, "unexpected end of input")),
        }
    }
}

fn divide(a: &PolynomialXP, d: &PolynomialXP) -> Option<PolynomialXP> {
    if !d.is_constant() {
        return None;
    }
    let c: HbarPoly = d.constant_term();
    if c.is_zero() || c.degree() != Some(0) {
        return None;
    }
    let inv = c.classical_part().inverse().ok()?;
    Some(a.scale(&inv))
}

pub fn parse_polynomial(src: &str) -> Result<PolynomialXP> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(err(0, "empty polynomial"));
    }
    let mut parser = Parser {
        toks,
        at: 0,
        end: src.len(),
    };
    let out = parser.expr()?;
    if parser.at < parser.toks.len() {
        return Err(err(parser.pos(), "trailing input"));
    }
    Ok(out)
}

/// Parses an ℏ-free scalar such as `-1/96` or `sqrt2/4`.
pub fn parse_scalar(src: &str) -> Result<Surd> {
    let p = parse_polynomial(src)?;
    if !p.is_constant() || p.hbar_degree() > 0 {
        return Err(err(0, "expected an hbar-free constant"));
    }
    Ok(p.constant_term().classical_part())
}

/// Parses a polynomial in ℏ only, such as `-hbar^2/4`.
pub fn parse_hbar_poly(src: &str) -> Result<HbarPoly> {
    let p = parse_polynomial(src)?;
    if !p.is_constant() {
        return Err(err(0, "expected a constant in hbar"));
    }
    Ok(p.constant_term())
}
