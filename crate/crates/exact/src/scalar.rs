//! Tagged scalar tower: Q, Q(x₁..x_m), and nilpotent extensions of either.
//!
//! An element with `s` nilpotents is stored as its `2^s` components indexed
//! by subsets of `{ε₁..ε_s}` (bit masks); `ε_i² = 0` while mixed products
//! survive. Mixed-tower arithmetic promotes to the join.

use crate::mpoly::MPoly;
use crate::ratfunc::RatFunc;
use crate::ring::{q, q_is_zero, Ring, Q};
use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    Rational(Q),
    Function(RatFunc),
}

impl Base {
    fn arity(&self) -> Option<usize> {
        match self {
            Base::Rational(_) => None,
            Base::Function(f) => Some(f.arity()),
        }
    }

    fn promote(&self, arity: Option<usize>) -> Base {
        match (self, arity) {
            (Base::Rational(c), Some(a)) => Base::Function(RatFunc::constant(a, c.clone())),
            _ => self.clone(),
        }
    }

    fn zero(arity: Option<usize>) -> Base {
        match arity {
            None => Base::Rational(q(0)),
            Some(a) => Base::Function(RatFunc::constant(a, q(0))),
        }
    }

    fn op(&self, o: &Base, f: impl Fn(&Q, &Q) -> Q, g: impl Fn(&RatFunc, &RatFunc) -> RatFunc) -> Base {
        let ar = self.arity().or(o.arity());
        match (self.promote(ar), o.promote(ar)) {
            (Base::Rational(a), Base::Rational(b)) => Base::Rational(f(&a, &b)),
            (Base::Function(a), Base::Function(b)) => {
                assert_eq!(a.arity(), b.arity(), "rational functions over different charts");
                Base::Function(g(&a, &b))
            }
            _ => unreachable!(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Base::Rational(c) => q_is_zero(c),
            Base::Function(f) => Ring::is_zero(f),
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Rational(c) => write!(f, "{}", crate::ring::fmt_q(c)),
            Base::Function(r) => write!(f, "{r}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scalar {
    nil: u32,
    parts: Vec<Base>,
}

/// Which layer of the tower a scalar lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tower {
    pub function_arity: Option<usize>,
    pub nilpotents: u32,
}

impl Scalar {
    pub fn rational(c: Q) -> Self {
        Scalar { nil: 0, parts: vec![Base::Rational(c)] }
    }

    pub fn function(f: RatFunc) -> Self {
        Scalar { nil: 0, parts: vec![Base::Function(f)] }
    }

    pub fn poly(p: MPoly) -> Self {
        Scalar::function(RatFunc::from_poly(p))
    }

    /// `ε_i` (0-based) inside a tower with `s` nilpotents.
    pub fn eps(i: u32, s: u32) -> Self {
        assert!(i < s);
        let mut parts = vec![Base::Rational(q(0)); 1 << s];
        parts[1 << i] = Base::Rational(q(1));
        Scalar { nil: s, parts }
    }

    pub fn tower(&self) -> Tower {
        Tower { function_arity: self.parts[0].arity(), nilpotents: self.nil }
    }

    /// Coefficient of `ε^mask`.
    pub fn part(&self, mask: usize) -> &Base {
        &self.parts[mask]
    }

    fn arity(&self) -> Option<usize> {
        self.parts[0].arity()
    }

    fn lift(&self, nil: u32, arity: Option<usize>) -> Scalar {
        let mut parts = vec![Base::zero(arity); 1 << nil];
        for (i, p) in self.parts.iter().enumerate() {
            parts[i] = p.promote(arity);
        }
        Scalar { nil, parts }
    }

    fn join(&self, o: &Scalar) -> (Scalar, Scalar) {
        let nil = self.nil.max(o.nil);
        let ar = self.arity().or(o.arity());
        (self.lift(nil, ar), o.lift(nil, ar))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, p) in self.parts.iter().enumerate() {
            if mask > 0 && p.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({p})")?;
            for i in 0..self.nil {
                if mask & (1 << i) != 0 {
                    write!(f, "*e{}", i + 1)?;
                }
            }
        }
        Ok(())
    }
}

impl Ring for Scalar {
    fn zero_like(&self) -> Self {
        Scalar { nil: self.nil, parts: vec![Base::zero(self.arity()); 1 << self.nil] }
    }
    fn one_like(&self) -> Self {
        self.from_q_like(&q(1))
    }
    fn from_q_like(&self, c: &Q) -> Self {
        Scalar::rational(c.clone()).lift(self.nil, self.arity())
    }
    fn add(&self, o: &Self) -> Self {
        let (a, b) = self.join(o);
        let parts = a.parts.iter().zip(&b.parts).map(|(x, y)| x.op(y, |p, q| p + q, |p, q| p.add(q))).collect();
        Scalar { nil: a.nil, parts }
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.join(o);
        let mut out = a.zero_like();
        for (i, x) in a.parts.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.parts.iter().enumerate() {
                if i & j != 0 || y.is_zero() {
                    continue;
                }
                let t = x.op(y, |p, q| p * q, |p, q| p.mul(q));
                out.parts[i | j] = out.parts[i | j].op(&t, |p, q| p + q, |p, q| p.add(q));
            }
        }
        out
    }
    fn neg(&self) -> Self {
        let parts = self
            .parts
            .iter()
            .map(|p| match p {
                Base::Rational(c) => Base::Rational(-c),
                Base::Function(f) => Base::Function(Ring::neg(f)),
            })
            .collect();
        Scalar { nil: self.nil, parts }
    }
    fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }
    fn try_inv(&self) -> Option<Self> {
        let a0 = match &self.parts[0] {
            Base::Rational(c) => Scalar::rational(c.try_inv()?),
            Base::Function(f) => Scalar::function(f.try_inv()?),
        }
        .lift(self.nil, self.arity());
        let n = self.mul(&a0).sub(&self.one_like());
        let mn = n.neg();
        let mut acc = self.one_like();
        let mut p = self.one_like();
        for _ in 0..self.nil {
            p = p.mul(&mn);
            acc = acc.add(&p);
        }
        Some(acc.mul(&a0))
    }
}
