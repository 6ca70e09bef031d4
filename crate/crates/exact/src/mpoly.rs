//! Sparse multivariate polynomials over Q in graded-lexicographic order.

use crate::multi::Mi;
use crate::ring::{fmt_q, q, q_is_zero, Ring, Q};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Mi);

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        let da: u32 = self.0.iter().sum();
        let db: u32 = other.0.iter().sum();
        da.cmp(&db).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct MPoly {
    arity: usize,
    terms: BTreeMap<Mono, Q>,
}

impl MPoly {
    pub fn zero(arity: usize) -> Self {
        MPoly { arity, terms: BTreeMap::new() }
    }

    pub fn constant(arity: usize, c: Q) -> Self {
        let mut p = MPoly::zero(arity);
        if !q_is_zero(&c) {
            p.terms.insert(Mono(vec![0; arity]), c);
        }
        p
    }

    pub fn one(arity: usize) -> Self {
        MPoly::constant(arity, q(1))
    }

    pub fn var(arity: usize, i: usize) -> Self {
        let mut e = vec![0; arity];
        e[i] = 1;
        MPoly::monomial(arity, e, q(1))
    }

    pub fn monomial(arity: usize, exps: Mi, c: Q) -> Self {
        assert_eq!(exps.len(), arity, "monomial arity");
        let mut p = MPoly::zero(arity);
        if !q_is_zero(&c) {
            p.terms.insert(Mono(exps), c);
        }
        p
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Mi, Q)>) -> Self {
        let mut p = MPoly::zero(arity);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn add_term(&mut self, e: Mi, c: Q) {
        if q_is_zero(&c) {
            return;
        }
        let key = Mono(e);
        let v = self.terms.entry(key.clone()).or_insert_with(Q::zero);
        *v += c;
        if q_is_zero(v) {
            self.terms.remove(&key);
        }
    }

    /// Terms in descending term order.
    pub fn terms(&self) -> impl Iterator<Item = (&Mi, &Q)> {
        self.terms.iter().rev().map(|(m, c)| (&m.0, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &[u32]) -> Q {
        self.terms.get(&Mono(e.to_vec())).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> i64 {
        self.terms.keys().next_back().map(|m| m.0.iter().sum::<u32>() as i64).unwrap_or(-1)
    }

    pub fn degree_in(&self, v: usize) -> i64 {
        self.terms.keys().map(|m| m.0[v] as i64).max().unwrap_or(-1)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_constant() {
            Some(self.coeff(&vec![0; self.arity]))
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<(&Mi, &Q)> {
        self.terms.iter().next_back().map(|(m, c)| (&m.0, c))
    }

    pub fn leading_coeff(&self) -> Q {
        self.leading().map(|(_, c)| c.clone()).unwrap_or_else(Q::zero)
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        debug_assert_eq!(self.arity, o.arity);
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.0.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &MPoly) -> MPoly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.0.clone(), -c.clone());
        }
        r
    }

    pub fn neg(&self) -> MPoly {
        MPoly { arity: self.arity, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, c: &Q) -> MPoly {
        if q_is_zero(c) {
            return MPoly::zero(self.arity);
        }
        MPoly { arity: self.arity, terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul(&self, o: &MPoly) -> MPoly {
        debug_assert_eq!(self.arity, o.arity);
        let mut acc: BTreeMap<Mono, Q> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let e: Mi = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                let v = acc.entry(Mono(e)).or_insert_with(Q::zero);
                *v += ca * cb;
            }
        }
        acc.retain(|_, c| !q_is_zero(c));
        MPoly { arity: self.arity, terms: acc }
    }

    pub fn mul_mono(&self, e: &[u32], c: &Q) -> MPoly {
        let mut r = MPoly::zero(self.arity);
        for (m, x) in &self.terms {
            let ne: Mi = m.0.iter().zip(e).map(|(a, b)| a + b).collect();
            r.terms.insert(Mono(ne), x * c);
        }
        r.terms.retain(|_, c| !q_is_zero(c));
        r
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one(self.arity);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn deriv(&self, i: usize) -> MPoly {
        let mut r = MPoly::zero(self.arity);
        for (m, c) in &self.terms {
            if m.0[i] > 0 {
                let mut e = m.0.clone();
                let k = e[i];
                e[i] -= 1;
                r.add_term(e, c * q(k as i64));
            }
        }
        r
    }

    /// Iterated derivative `∂^α`.
    pub fn deriv_mi(&self, a: &[u32]) -> MPoly {
        let mut r = self.clone();
        for (i, &k) in a.iter().enumerate() {
            for _ in 0..k {
                r = r.deriv(i);
            }
        }
        r
    }

    /// Evaluate in any ring; `like` fixes the shape of the result.
    pub fn eval<R: Ring>(&self, vals: &[R], like: &R) -> R {
        assert_eq!(vals.len(), self.arity, "eval arity");
        let mut acc = like.zero_like();
        if self.terms.is_empty() {
            return acc;
        }
        let maxd: Vec<u32> =
            (0..self.arity).map(|v| self.terms.keys().map(|m| m.0[v]).max().unwrap_or(0)).collect();
        let mut pows: Vec<Vec<R>> = Vec::with_capacity(self.arity);
        for v in 0..self.arity {
            let mut pv = vec![like.one_like()];
            for d in 1..=maxd[v] as usize {
                let next = pv[d - 1].mul(&vals[v]);
                pv.push(next);
            }
            pows.push(pv);
        }
        for (m, c) in &self.terms {
            let mut t = like.from_q_like(c);
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&pows[v][e as usize]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn eval_q(&self, vals: &[Q]) -> Q {
        self.eval(vals, &Q::zero())
    }

    /// Substitute polynomials (possibly of a different arity) for the variables.
    pub fn compose(&self, subs: &[MPoly]) -> MPoly {
        let like = subs.first().map(|p| MPoly::zero(p.arity)).unwrap_or_else(|| MPoly::zero(0));
        self.eval(subs, &like)
    }

    /// Re-embed into a larger variable set: variable `i` becomes variable `map[i]`.
    pub fn reindex(&self, arity: usize, map: &[usize]) -> MPoly {
        let mut r = MPoly::zero(arity);
        for (m, c) in &self.terms {
            let mut e = vec![0; arity];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            r.add_term(e, c.clone());
        }
        r
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.0[v] > 0)
    }

    /// Coefficients as a polynomial in variable `v`: entry `d` multiplies `x_v^d`.
    pub fn coeffs_in(&self, v: usize) -> Vec<MPoly> {
        let d = self.degree_in(v);
        if d < 0 {
            return vec![];
        }
        let mut out = vec![MPoly::zero(self.arity); d as usize + 1];
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let k = e[v] as usize;
            e[v] = 0;
            out[k].add_term(e, c.clone());
        }
        out
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        if d.is_zero() {
            return None;
        }
        let (dm, dc) = {
            let (m, c) = d.leading().unwrap();
            (m.clone(), c.clone())
        };
        let mut rem = self.clone();
        let mut quo = MPoly::zero(self.arity);
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let e = crate::multi::sub(&rm, &dm)?;
            let c = rc / &dc;
            quo.add_term(e.clone(), c.clone());
            rem = rem.sub(&d.mul_mono(&e, &c));
        }
        Some(quo)
    }

    /// Scale so the leading coefficient is 1.
    pub fn monic(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading_coeff();
        self.scale(&lc.recip())
    }

    /// Greatest common divisor, normalized to be monic (1 for coprime inputs).
    pub fn gcd(&self, o: &MPoly) -> MPoly {
        if self.is_zero() {
            return o.monic();
        }
        if o.is_zero() {
            return self.monic();
        }
        if self.is_constant() || o.is_constant() {
            return MPoly::one(self.arity);
        }
        let v = (0..self.arity).rev().find(|&v| self.uses_var(v) || o.uses_var(v)).unwrap();
        if !self.uses_var(v) {
            return self.gcd(&o.content_in(v));
        }
        if !o.uses_var(v) {
            return o.gcd(&self.content_in(v));
        }
        let ca = self.content_in(v);
        let cb = o.content_in(v);
        let gc = ca.gcd(&cb);
        let mut a = self.div_exact(&ca).expect("content divides");
        let mut b = o.div_exact(&cb).expect("content divides");
        if a.degree_in(v) < b.degree_in(v) {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() && b.uses_var(v) {
            let r = a.prem(&b, v);
            a = b;
            b = if r.is_zero() { r } else { r.primitive_in(v) };
        }
        let g = if b.is_zero() { a.primitive_in(v) } else { MPoly::one(self.arity) };
        gc.mul(&g).monic()
    }

    /// gcd of the coefficients with respect to variable `v`.
    pub fn content_in(&self, v: usize) -> MPoly {
        let mut g = MPoly::zero(self.arity);
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = if g.is_zero() { c.monic() } else { g.gcd(&c) };
            if g.is_constant() {
                return MPoly::one(self.arity);
            }
        }
        g
    }

    pub fn primitive_in(&self, v: usize) -> MPoly {
        let c = self.content_in(v);
        self.div_exact(&c).expect("content divides").monic()
    }

    /// Pseudo-remainder of `self` by `b` as polynomials in `v`.
    pub fn prem(&self, b: &MPoly, v: usize) -> MPoly {
        let db = b.degree_in(v);
        let bc = b.coeffs_in(v);
        let lb = bc[db as usize].clone();
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= db {
            let dr = r.degree_in(v);
            let rc = r.coeffs_in(v);
            let lr = rc[dr as usize].clone();
            let mut e = vec![0; self.arity];
            e[v] = (dr - db) as u32;
            let shifted = b.mul(&lr).mul_mono(&e, &q(1));
            r = r.mul(&lb).sub(&shifted);
        }
        r
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (e, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = e.iter().all(|&x| x == 0);
            if !a.is_one() || is_const {
                factors.push(fmt_q(&a));
            }
            for (v, &k) in e.iter().enumerate() {
                if k == 1 {
                    factors.push(names[v].clone());
                } else if k > 1 {
                    factors.push(format!("{}^{}", names[v], k));
                }
            }
            s.push_str(&factors.join("*"));
        }
        s
    }

    pub fn default_names(arity: usize) -> Vec<String> {
        (1..=arity).map(|i| format!("x{i}")).collect()
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_with(&MPoly::default_names(self.arity)))
    }
}

impl Ring for MPoly {
    fn zero_like(&self) -> Self {
        MPoly::zero(self.arity)
    }
    fn one_like(&self) -> Self {
        MPoly::one(self.arity)
    }
    fn from_q_like(&self, c: &Q) -> Self {
        MPoly::constant(self.arity, c.clone())
    }
    fn add(&self, o: &Self) -> Self {
        MPoly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        MPoly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        MPoly::mul(self, o)
    }
    fn neg(&self) -> Self {
        MPoly::neg(self)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn try_inv(&self) -> Option<Self> {
        let c = self.constant_value()?;
        if q_is_zero(&c) {
            None
        } else {
            Some(MPoly::constant(self.arity, c.recip()))
        }
    }
    fn scale(&self, c: &Q) -> Self {
        MPoly::scale(self, c)
    }
}

impl crate::ring::DiffRing for MPoly {
    fn deriv(&self, i: usize) -> Self {
        MPoly::deriv(self, i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> MPoly {
        MPoly::var(2, i)
    }

    #[test]
    fn display_descending() {
        let p = x(0).mul(&x(0)).scale(&crate::ring::qf(3, 4)).sub(&x(1));
        assert_eq!(p.to_string(), "3/4*x1^2 - x2");
    }

    #[test]
    fn gcd_recovers_common_factor() {
        let a = x(0).add(&x(1));
        let b = x(0).sub(&MPoly::one(2));
        let c = x(0).mul(&x(1)).add(&MPoly::constant(2, q(2)));
        let g = a.mul(&b).gcd(&a.mul(&c));
        assert_eq!(g, a.monic());
        assert!(b.gcd(&c).is_constant());
    }
}
