//! Polynomial literals such as `3/4*x1^2*x2 - x3`.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor | '/' integer)*
//! factor := integer | name ['^' integer] | '(' expr ')' ['^' integer] | '-' factor
//! ```
//! Whitespace is ignored. Errors carry the byte offset of the problem.

use crate::error::{ExactError, Result};
use crate::mpoly::MPoly;
use crate::ring::Q;
use num_bigint::BigInt;

pub struct PolyParser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [String],
    base: usize,
}

/// Parse with variables `names[i] ↦ x_i`.
pub fn parse_poly(src: &str, names: &[String]) -> Result<MPoly> {
    parse_poly_at(src, names, 0)
}

/// As `parse_poly`, reporting offsets shifted by `base`.
pub fn parse_poly_at(src: &str, names: &[String], base: usize) -> Result<MPoly> {
    let mut p = PolyParser { src: src.as_bytes(), pos: 0, names, base };
    let e = p.expr()?;
    p.ws();
    if p.pos < p.src.len() {
        return Err(p.err(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

/// `x1..xm`.
pub fn default_names(m: usize) -> Vec<String> {
    MPoly::default_names(m)
}

impl<'a> PolyParser<'a> {
    fn err(&self, msg: impl Into<String>) -> ExactError {
        ExactError::Syntax { offset: self.base + self.pos, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    fn arity(&self) -> usize {
        self.names.len()
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    self.ws();
                    let at = self.pos;
                    let d = self.integer()?;
                    if d == BigInt::from(0) {
                        self.pos = at;
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.scale(&Q::new(BigInt::from(1), d));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        self.ws();
        let at = self.pos;
        let e = self.integer()?;
        u32::try_from(e).map_err(|_| {
            self.pos = at;
            self.err("exponent too large")
        })
    }

    fn factor(&mut self) -> Result<MPoly> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                let k = self.exponent()?;
                Ok(e.pow(k))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let k = self.exponent()?;
                Ok(MPoly::constant(self.arity(), Q::from_integer(n)).pow(k))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let Some(i) = self.names.iter().position(|n| n == name) else {
                    self.pos = start;
                    return Err(self.err(format!("unknown variable `{name}`")));
                };
                let k = self.exponent()?;
                Ok(MPoly::var(self.arity(), i).pow(k))
            }
            Some(c) => Err(self.err(format!("unexpected `{}`", c as char))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{q, qf};

    #[test]
    fn literal_matches_term_map() {
        let names = default_names(3);
        let p = parse_poly("3/4*x1^2 - x2", &names).unwrap();
        let want = MPoly::from_terms(3, [(vec![2, 0, 0], qf(3, 4)), (vec![0, 1, 0], q(-1))]);
        assert_eq!(p, want);
        assert_eq!(p.to_string(), "3/4*x1^2 - x2");
    }

    #[test]
    fn parens_and_powers() {
        let names = default_names(2);
        let p = parse_poly("(x1 + x2)^2 - 2*x1*x2", &names).unwrap();
        assert_eq!(p, parse_poly("x1^2+x2^2", &names).unwrap());
        assert_eq!(parse_poly("-(-x1)", &names).unwrap(), MPoly::var(2, 0));
    }

    #[test]
    fn errors_carry_offsets() {
        let names = default_names(1);
        match parse_poly("x1 + y", &names) {
            Err(ExactError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_poly("x1 +", &names).is_err());
        assert!(parse_poly("x1/0", &names).is_err());
    }
}
