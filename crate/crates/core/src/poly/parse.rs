//! Recursive-descent parser for the polynomial input language.
//!
//! ```text
//! expr     := ['-'] term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := base ('^' nat)?
//! base     := var | rational | '(' expr ')'
//! rational := int ('/' posint)?
//! ```
//!
//! Division is only accepted by a nonzero constant, which covers both
//! rational literals like `3/2` and forms like `n*(n-1)/2`. Implicit
//! multiplication is rejected.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::IntPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at position {position}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = text[start..i].parse().expect("digits");
                out.push((start, Tok::Num(n)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                return Err(ParseError {
                    position: start,
                    message: format!("unexpected character '{}'", text[start..].chars().next().unwrap()),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.here(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<IntPoly, ParseError> {
        let nvars = self.vars.len();
        let negate = if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        debug_assert_eq!(acc.nvars(), nvars);
        Ok(acc)
    }

    fn term(&mut self) -> Result<IntPoly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let at = self.here();
                    let divisor = self.factor()?;
                    if !divisor.is_constant() || divisor.is_zero() {
                        return Err(ParseError {
                            position: at,
                            message: "division is only allowed by a nonzero constant".into(),
                        });
                    }
                    let c = divisor.constant_term();
                    acc = acc.scale(&(BigRational::from_integer(1.into()) / c));
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    return self.err("implicit multiplication is not accepted; use '*'")
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<IntPoly, ParseError> {
        let base = self.base()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    let e = n.to_u32();
                    match e {
                        Some(e) => {
                            self.pos += 1;
                            Ok(base.pow(e))
                        }
                        None => self.err("exponent too large"),
                    }
                }
                _ => self.err("exponent must be a nonnegative integer"),
            }
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<IntPoly, ParseError> {
        let nvars = self.vars.len();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(IntPoly::constant(nvars, BigRational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(IntPoly::var(nvars, i))
                }
                None => self.err(format!("unknown variable '{name}'")),
            },
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => self.err("expected a number, variable or '('"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses `text` as a polynomial in the declared variables.
pub fn parse_poly(text: &str, vars: &[&str]) -> Result<IntPoly, ParseError> {
    if let Some(bad) = vars.iter().find(|v| !is_identifier(v)) {
        return Err(ParseError {
            position: 0,
            message: format!("'{bad}' is not a valid variable name"),
        });
    }
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
        vars,
    };
    if p.toks.is_empty() {
        return p.err("empty expression");
    }
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(out)
}

/// Parses a vector of polynomials written `(e1, e2, …)` or `e1; e2; …`.
pub fn parse_poly_vector(text: &str, vars: &[&str]) -> Result<Vec<IntPoly>, ParseError> {
    let trimmed = text.trim();
    let (body, shift) = if trimmed.starts_with('(') && wraps_whole(trimmed) {
        (&trimmed[1..trimmed.len() - 1], text.find('(').unwrap() + 1)
    } else {
        (trimmed, text.len() - text.trim_start().len())
    };
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' | ';' if depth == 0 => {
                parts.push((start, &body[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push((start, &body[start..]));
    parts
        .into_iter()
        .map(|(off, s)| {
            parse_poly(s, vars).map_err(|e| ParseError {
                position: e.position + off + shift,
                message: e.message,
            })
        })
        .collect()
}

fn wraps_whole(s: &str) -> bool {
    let mut depth = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 && i != s.len() - 1 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
