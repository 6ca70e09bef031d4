//! Rational functions in reduced form with monic denominator.

use crate::mpoly::MPoly;
use crate::ring::{DiffRing, Ring, Q};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: MPoly,
    den: MPoly,
}

impl RatFunc {
    pub fn new(num: MPoly, den: MPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::reduce(num, den))
    }

    pub fn from_poly(p: MPoly) -> Self {
        let a = p.arity();
        RatFunc { num: p, den: MPoly::one(a) }
    }

    pub fn constant(arity: usize, c: Q) -> Self {
        Self::from_poly(MPoly::constant(arity, c))
    }

    pub fn var(arity: usize, i: usize) -> Self {
        Self::from_poly(MPoly::var(arity, i))
    }

    fn reduce(num: MPoly, den: MPoly) -> Self {
        if num.is_zero() {
            let a = den.arity();
            return RatFunc { num, den: MPoly::one(a) };
        }
        if den.is_constant() {
            let c = den.leading_coeff();
            let a = den.arity();
            return RatFunc { num: num.scale(&c.recip()), den: MPoly::one(a) };
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let lc = d.leading_coeff();
        if lc != crate::ring::q(1) {
            let inv = lc.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RatFunc { num: n, den: d }
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn arity(&self) -> usize {
        self.num.arity()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_constant()
    }

    pub fn as_poly(&self) -> Option<&MPoly> {
        if self.is_poly() {
            Some(&self.num)
        } else {
            None
        }
    }

    /// Value at a point; `None` where the denominator vanishes.
    pub fn eval_q(&self, x: &[Q]) -> Option<Q> {
        let d = self.den.eval_q(x);
        if crate::ring::q_is_zero(&d) {
            return None;
        }
        Some(self.num.eval_q(x) / d)
    }

    /// Value in any ring where the denominator is invertible.
    pub fn eval<R: Ring>(&self, x: &[R], like: &R) -> Option<R> {
        let n = self.num.eval(x, like);
        if self.is_poly() {
            return Some(n);
        }
        let d = self.den.eval(x, like).try_inv()?;
        Some(n.mul(&d))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_poly() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Ring for RatFunc {
    fn zero_like(&self) -> Self {
        RatFunc::from_poly(MPoly::zero(self.arity()))
    }
    fn one_like(&self) -> Self {
        RatFunc::from_poly(MPoly::one(self.arity()))
    }
    fn from_q_like(&self, c: &Q) -> Self {
        RatFunc::constant(self.arity(), c.clone())
    }
    fn add(&self, o: &Self) -> Self {
        if self.is_poly() && o.is_poly() {
            return RatFunc::from_poly(self.num.add(&o.num));
        }
        if self.den == o.den {
            return Self::reduce(self.num.add(&o.num), self.den.clone());
        }
        Self::reduce(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }
    fn sub(&self, o: &Self) -> Self {
        Ring::add(self, &Ring::neg(o))
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_poly() && o.is_poly() {
            return RatFunc::from_poly(self.num.mul(&o.num));
        }
        Self::reduce(self.num.mul(&o.num), self.den.mul(&o.den))
    }
    fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn try_inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(Self::reduce(self.den.clone(), self.num.clone()))
        }
    }
    fn scale(&self, c: &Q) -> Self {
        if crate::ring::q_is_zero(c) {
            return self.zero_like();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }
}

impl DiffRing for RatFunc {
    fn deriv(&self, i: usize) -> Self {
        if self.is_poly() {
            return RatFunc::from_poly(self.num.deriv(i));
        }
        let n = self.num.deriv(i).mul(&self.den).sub(&self.num.mul(&self.den.deriv(i)));
        Self::reduce(n, self.den.mul(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::q;

    #[test]
    fn reduces_and_normalizes() {
        let x = MPoly::var(1, 0);
        let one = MPoly::one(1);
        let r = RatFunc::new(x.mul(&x).sub(&one), x.sub(&one).scale(&q(2))).unwrap();
        assert!(r.is_poly());
        assert_eq!(r.num(), &x.add(&one).scale(&crate::ring::qf(1, 2)));
        let s = RatFunc::new(one.clone(), x.scale(&q(3)).add(&one)).unwrap();
        assert_eq!(s.den().leading_coeff(), q(1));
    }
}
