//! Exact text format for normal-ordered series.
//!
//! ```text
//! series := term (('+' | '-') term)*
//! term   := ['-'] factor (['*'] factor)*
//! factor := atom ['^' integer]
//! atom   := integer ['/' integer] | 'i' | 'q' | 'lambda' | 'λ' | var | '(' series ')'
//! var    := 'x+' | 'x3' | 'x-' | 't' | 'p+' | 'p3' | 'p-'
//! ```
//! Juxtaposed variables denote the ordered (normal-ordered) monomial.
//! Negative exponents are allowed on q-only factors.

use super::series::{Mono, NSeries, Ordering, Space};
use crate::error::{QError, QResult};
use crate::qcoeff::QScalar;
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize, Space),
    I,
    Q,
    Lambda,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(s: &str) -> QResult<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut k = 0;
    let err = |pos: usize, msg: &str| QError::ParseError { pos, msg: msg.to_string() };
    while k < chars.len() {
        let (pos, c) = chars[k];
        let next = chars.get(k + 1).map(|p| p.1);
        match c {
            ' ' | '\t' | '\n' => {
                k += 1;
            }
            '0'..='9' => {
                let mut j = k;
                while j < chars.len() && chars[j].1.is_ascii_digit() {
                    j += 1;
                }
                let end = chars.get(j).map(|p| p.0).unwrap_or(s.len());
                out.push((pos, Tok::Int(s[pos..end].parse().unwrap())));
                k = j;
            }
            'x' | 'p' => {
                let space = if c == 'x' { Space::Position } else { Space::Momentum };
                let idx = match next {
                    Some('+') => 0,
                    Some('3') => 1,
                    Some('-') => 2,
                    _ => return Err(err(pos, "expected one of +, 3, - after coordinate name")),
                };
                out.push((pos, Tok::Var(idx, space)));
                k += 2;
            }
            't' => {
                out.push((pos, Tok::Var(3, Space::Position)));
                k += 1;
            }
            'i' => {
                out.push((pos, Tok::I));
                k += 1;
            }
            'q' => {
                out.push((pos, Tok::Q));
                k += 1;
            }
            'λ' => {
                out.push((pos, Tok::Lambda));
                k += 1;
            }
            'l' if s[pos..].starts_with("lambda") => {
                out.push((pos, Tok::Lambda));
                k += 6;
            }
            '+' => {
                out.push((pos, Tok::Plus));
                k += 1;
            }
            '-' => {
                out.push((pos, Tok::Minus));
                k += 1;
            }
            '*' | '·' => {
                out.push((pos, Tok::Star));
                k += 1;
            }
            '/' => {
                out.push((pos, Tok::Slash));
                k += 1;
            }
            '^' => {
                out.push((pos, Tok::Caret));
                k += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                k += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                k += 1;
            }
            _ => return Err(err(pos, &format!("unexpected character {c:?}"))),
        }
    }
    out.push((s.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    k: usize,
    space: Option<Space>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.k].1
    }

    fn pos(&self) -> usize {
        self.toks[self.k].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.k].1.clone();
        if self.k + 1 < self.toks.len() {
            self.k += 1;
        }
        t
    }

    fn err<T>(&self, msg: &str) -> QResult<T> {
        Err(QError::ParseError { pos: self.pos(), msg: msg.to_string() })
    }

    fn series(&mut self) -> QResult<NSeries> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(t: &Tok) -> bool {
        matches!(t, Tok::Int(_) | Tok::Var(..) | Tok::I | Tok::Q | Tok::Lambda | Tok::LParen)
    }

    fn term(&mut self) -> QResult<NSeries> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut acc = self.factor()?;
        loop {
            if *self.peek() == Tok::Star {
                self.bump();
                acc = acc.commutative_mul(&self.factor()?);
            } else if Self::starts_factor(self.peek()) {
                acc = acc.commutative_mul(&self.factor()?);
            } else {
                break;
            }
        }
        Ok(if neg { acc.neg() } else { acc })
    }

    fn integer(&mut self) -> QResult<i64> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                let v: i64 = n.try_into().map_err(|_| QError::ParseError { pos, msg: "exponent too large".into() })?;
                Ok(if neg { -v } else { v })
            }
            _ => self.err("expected integer exponent"),
        }
    }

    fn factor(&mut self) -> QResult<NSeries> {
        let start = self.pos();
        let (base, scalar_only) = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let e = self.integer()?;
        if e < 0 {
            if !scalar_only {
                return Err(QError::ParseError { pos: start, msg: "negative exponent on a coordinate".into() });
            }
            let c = base.coeff(&Mono::ONE);
            let v = c.powi(e).map_err(|_| QError::ParseError { pos: start, msg: "zero to a negative power".into() })?;
            return Ok(NSeries::constant(v, base.space, Ordering::Standard));
        }
        if e > 64 {
            return Err(QError::ParseError { pos: start, msg: "exponent too large".into() });
        }
        let mut acc = NSeries::one(base.space, Ordering::Standard);
        for _ in 0..e {
            acc = acc.commutative_mul(&base);
        }
        Ok(acc)
    }

    fn scalar(&self, c: QScalar) -> NSeries {
        NSeries::constant(c, self.space.unwrap_or(Space::Position), Ordering::Standard)
    }

    fn atom(&mut self) -> QResult<(NSeries, bool)> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => {
                if *self.peek() == Tok::Slash {
                    self.bump();
                    match self.bump() {
                        Tok::Int(d) if d != BigInt::from(0) => {
                            Ok((self.scalar(QScalar::from_rational(BigRational::new(n, d))), true))
                        }
                        _ => Err(QError::ParseError { pos, msg: "expected nonzero denominator".into() }),
                    }
                } else {
                    Ok((self.scalar(QScalar::from_rational(BigRational::from_integer(n))), true))
                }
            }
            Tok::I => Ok((self.scalar(QScalar::i()), true)),
            Tok::Q => Ok((self.scalar(QScalar::q()), true)),
            Tok::Lambda => Ok((self.scalar(QScalar::lambda()), true)),
            Tok::Var(idx, sp) => {
                if idx == 3 {
                    // t is allowed alongside either space
                } else {
                    match self.space {
                        None => self.space = Some(sp),
                        Some(s) if s != sp => {
                            return Err(QError::ParseError { pos, msg: "position and momentum variables mixed".into() })
                        }
                        _ => {}
                    }
                }
                let mut e = [0u32; 4];
                e[idx] = 1;
                Ok((NSeries::monomial(Mono(e), QScalar::one(), self.space.unwrap_or(Space::Position), Ordering::Standard), false))
            }
            Tok::LParen => {
                let inner = self.series()?;
                if *self.peek() != Tok::RParen {
                    return self.err("expected ')'");
                }
                self.bump();
                let scalar_only = inner.terms().all(|(m, _)| *m == Mono::ONE);
                Ok((inner, scalar_only))
            }
            Tok::End => Err(QError::ParseError { pos, msg: "unexpected end of input".into() }),
            t => Err(QError::ParseError { pos, msg: format!("unexpected token {t:?}") }),
        }
    }
}

/// Parse a series; the space follows the variable names used.
pub fn parse_series(s: &str) -> QResult<NSeries> {
    let toks = lex(s)?;
    let mut p = Parser { toks, k: 0, space: None };
    let out = p.series()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    let space = p.space.unwrap_or(Space::Position);
    Ok(out.with_space(space))
}
