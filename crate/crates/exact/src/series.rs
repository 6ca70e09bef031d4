//! Truncated Taylor polynomials.
//!
//! `Series<R>` stores coefficients in monomial convention (`c_α` multiplies
//! `h^α`) over the graded enumeration of `multi`. Because the enumeration is
//! prefix-closed, a series of order `k` is a prefix of one of order `k+1`, so
//! mixed-order arithmetic is plain truncation to the shorter operand.
//! Order `-1` is the empty series (the zero space).

use crate::error::{ExactError, Result};
use crate::multi::{self, Mi};
use crate::ring::{mat_inv, DiffRing, Local, Ring, Q};
use std::fmt;
use std::sync::Arc;

#[derive(Debug)]
pub struct Shape {
    pub m: usize,
    pub order: i64,
    pub mis: Vec<Mi>,
    /// For each position γ, the pairs (α, β) with α + β = γ.
    prod: Vec<Vec<(usize, usize)>>,
    /// For each direction i and each position α of the lower shape, the
    /// source position of α + e_i and the factor α_i + 1.
    dpos: Vec<Vec<(usize, u32)>>,
    lower: Option<Arc<Shape>>,
}

impl Shape {
    pub fn new(m: usize, order: i64) -> Arc<Shape> {
        let mut cur: Option<Arc<Shape>> = None;
        for k in -1..=order.max(-1) {
            let mis = multi::list_upto(m, k);
            let mut prod = vec![Vec::new(); mis.len()];
            for (i, a) in mis.iter().enumerate() {
                for (j, b) in mis.iter().enumerate() {
                    if multi::degree(a) + multi::degree(b) <= k as u32 {
                        prod[multi::index(&multi::add(a, b))].push((i, j));
                    }
                }
            }
            let lower_len = multi::count_upto(m, k - 1);
            let dpos = (0..m)
                .map(|d| {
                    mis[..lower_len]
                        .iter()
                        .map(|a| {
                            let mut b = a.clone();
                            b[d] += 1;
                            (multi::index(&b), a[d] + 1)
                        })
                        .collect()
                })
                .collect();
            cur = Some(Arc::new(Shape { m, order: k, mis, prod, dpos, lower: cur }));
        }
        cur.unwrap()
    }

    pub fn len(&self) -> usize {
        self.mis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mis.is_empty()
    }

    /// The shape of order `k ≤ self.order`.
    pub fn at_order(self: &Arc<Self>, k: i64) -> Arc<Shape> {
        let mut s = self.clone();
        while s.order > k.max(-1) {
            s = s.lower.clone().expect("shape chain");
        }
        s
    }
}

#[derive(Clone)]
pub struct Series<R> {
    shape: Arc<Shape>,
    like: R,
    c: Vec<R>,
}

impl<R: fmt::Debug> fmt::Debug for Series<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series(order {}, {:?})", self.shape.order, self.c)
    }
}

impl<R: PartialEq> PartialEq for Series<R> {
    fn eq(&self, o: &Self) -> bool {
        self.shape.order == o.shape.order && self.shape.m == o.shape.m && self.c == o.c
    }
}

impl<R: Ring> Series<R> {
    /// Constant series; `like` fixes the coefficient shape.
    pub fn constant(shape: &Arc<Shape>, v: R) -> Self {
        let like = v.zero_like();
        let mut c = vec![like.clone(); shape.len()];
        if !c.is_empty() {
            c[0] = v;
        }
        Series { shape: shape.clone(), like, c }
    }

    /// `v + h_i`.
    pub fn variable(shape: &Arc<Shape>, v: R, i: usize) -> Self {
        let mut s = Self::constant(shape, v);
        if shape.order >= 1 {
            let p = multi::index(&multi::unit(shape.m, i));
            s.c[p] = s.like.one_like();
        }
        s
    }

    pub fn from_coeffs(shape: &Arc<Shape>, like: &R, c: Vec<R>) -> Self {
        assert_eq!(c.len(), shape.len());
        Series { shape: shape.clone(), like: like.zero_like(), c }
    }

    pub fn shape(&self) -> &Arc<Shape> {
        &self.shape
    }

    pub fn order(&self) -> i64 {
        self.shape.order
    }

    pub fn coeffs(&self) -> &[R] {
        &self.c
    }

    pub fn coeff(&self, a: &[u32]) -> R {
        let p = multi::index(a);
        if p < self.c.len() {
            self.c[p].clone()
        } else {
            self.like.clone()
        }
    }

    pub fn like(&self) -> &R {
        &self.like
    }

    /// Value at `h = 0`.
    pub fn value(&self) -> R {
        self.c.first().cloned().unwrap_or_else(|| self.like.clone())
    }

    /// Coefficient times `α!`, i.e. `∂^α` at the base point.
    pub fn derivative_at(&self, a: &[u32]) -> R {
        self.coeff(a).scale(&multi::factorial(a))
    }

    pub fn truncate(&self, k: i64) -> Self {
        if k >= self.shape.order {
            return self.clone();
        }
        let shape = self.shape.at_order(k);
        Series { c: self.c[..shape.len()].to_vec(), shape, like: self.like.clone() }
    }

    fn common(&self, o: &Self) -> Arc<Shape> {
        if self.shape.order <= o.shape.order {
            self.shape.clone()
        } else {
            o.shape.clone()
        }
    }

    pub fn map<S: Ring>(&self, like: &S, f: impl Fn(&R) -> S) -> Series<S> {
        Series { shape: self.shape.clone(), like: like.zero_like(), c: self.c.iter().map(f).collect() }
    }

    pub fn mul_coeff(&self, r: &R) -> Self {
        Series { shape: self.shape.clone(), like: self.like.clone(), c: self.c.iter().map(|x| x.mul(r)).collect() }
    }

    /// `∂/∂h_i`; the order drops by one.
    pub fn d(&self, i: usize) -> Self {
        let lower = self.shape.at_order(self.shape.order - 1);
        let c = self.shape.dpos[i]
            .iter()
            .map(|&(src, f)| self.c[src].scale(&crate::ring::q(f as i64)))
            .collect();
        Series { shape: lower, like: self.like.clone(), c }
    }

    /// Substitute series arguments (with zero constant term) for `h`.
    pub fn substitute(&self, args: &[Series<R>]) -> Series<R> {
        assert_eq!(args.len(), self.shape.m);
        let mut shape = self.shape.clone();
        if let Some(a) = args.first() {
            shape = shape_min(&a.shape, self.shape.order);
        }
        for a in args {
            if a.shape.order < shape.order {
                shape = a.shape.clone();
            }
        }
        let k = shape.order;
        let args: Vec<Series<R>> = args.iter().map(|a| a.truncate(k)).collect();
        let mut acc = Series::constant(&shape, self.like.clone());
        let one = Series::constant(&shape, self.like.one_like());
        // powers cache per variable, only as high as needed
        let mut pw: Vec<Vec<Series<R>>> = args.iter().map(|_| vec![one.clone()]).collect();
        for (a, c) in self.shape.mis.iter().zip(&self.c) {
            if c.is_zero() || multi::degree(a) as i64 > k {
                continue;
            }
            let mut t = one.clone();
            for (v, &e) in a.iter().enumerate() {
                while pw[v].len() <= e as usize {
                    let nxt = pw[v].last().unwrap().mul(&args[v]);
                    pw[v].push(nxt);
                }
                if e > 0 {
                    t = t.mul(&pw[v][e as usize]);
                }
            }
            acc = acc.add(&t.mul_coeff(c));
        }
        acc
    }
}

fn shape_min(s: &Arc<Shape>, k: i64) -> Arc<Shape> {
    if s.order <= k {
        s.clone()
    } else {
        s.at_order(k)
    }
}

impl<R: Ring> Ring for Series<R> {
    fn zero_like(&self) -> Self {
        Series::constant(&self.shape, self.like.clone())
    }
    fn one_like(&self) -> Self {
        Series::constant(&self.shape, self.like.one_like())
    }
    fn from_q_like(&self, c: &Q) -> Self {
        Series::constant(&self.shape, self.like.from_q_like(c))
    }
    fn add(&self, o: &Self) -> Self {
        let shape = self.common(o);
        let c = (0..shape.len()).map(|i| self.c[i].add(&o.c[i])).collect();
        Series { shape, like: self.like.clone(), c }
    }
    fn sub(&self, o: &Self) -> Self {
        let shape = self.common(o);
        let c = (0..shape.len()).map(|i| self.c[i].sub(&o.c[i])).collect();
        Series { shape, like: self.like.clone(), c }
    }
    fn mul(&self, o: &Self) -> Self {
        let shape = self.common(o);
        let mut c = Vec::with_capacity(shape.len());
        for pairs in &shape.prod {
            let mut acc = self.like.clone();
            for &(i, j) in pairs {
                if self.c[i].is_zero() || o.c[j].is_zero() {
                    continue;
                }
                acc = acc.add(&self.c[i].mul(&o.c[j]));
            }
            c.push(acc);
        }
        Series { shape, like: self.like.clone(), c }
    }
    fn neg(&self) -> Self {
        Series { shape: self.shape.clone(), like: self.like.clone(), c: self.c.iter().map(|x| x.neg()).collect() }
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    fn try_inv(&self) -> Option<Self> {
        if self.c.is_empty() {
            return Some(self.clone());
        }
        let a0 = self.c[0].try_inv()?;
        // a⁻¹ = a0⁻¹ Σ (−n)^j with n = a0⁻¹ a − 1 nilpotent of order > K
        let n = self.mul_coeff(&a0).sub(&self.one_like());
        let mn = n.neg();
        let mut acc = self.one_like();
        let mut p = self.one_like();
        for _ in 0..self.shape.order {
            p = p.mul(&mn);
            acc = acc.add(&p);
        }
        Some(acc.mul_coeff(&a0))
    }
    fn scale(&self, c: &Q) -> Self {
        Series { shape: self.shape.clone(), like: self.like.clone(), c: self.c.iter().map(|x| x.scale(c)).collect() }
    }
}

impl<R: Local> Local for Series<R> {
    fn base(&self) -> Q {
        self.value().base()
    }
}

impl<R: Ring> DiffRing for Series<R> {
    fn deriv(&self, i: usize) -> Self {
        self.d(i)
    }
}

/// A vector-valued truncated Taylor expansion `x₀ + h ↦ Σ c_α h^α`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<R = Q> {
    pub base: Vec<Q>,
    pub comps: Vec<Series<R>>,
}

impl<R: Ring> TruncSeries<R> {
    pub fn order(&self) -> i64 {
        self.comps.iter().map(|s| s.order()).min().unwrap_or(i64::MAX)
    }

    pub fn arity(&self) -> usize {
        self.base.len()
    }

    pub fn value(&self) -> Vec<R> {
        self.comps.iter().map(|s| s.value()).collect()
    }

    pub fn truncate(&self, k: i64) -> Self {
        TruncSeries { base: self.base.clone(), comps: self.comps.iter().map(|s| s.truncate(k)).collect() }
    }
}

impl TruncSeries<Q> {
    /// Jet of a polynomial map at `x0`.
    pub fn from_polys(polys: &[crate::mpoly::MPoly], x0: &[Q], order: i64) -> Self {
        let shape = Shape::new(x0.len(), order);
        let args: Vec<Series<Q>> =
            (0..x0.len()).map(|i| Series::variable(&shape, x0[i].clone(), i)).collect();
        let comps = polys.iter().map(|p| p.eval(&args, &args[0])).collect();
        TruncSeries { base: x0.to_vec(), comps }
    }

    pub fn identity(x0: &[Q], order: i64) -> Self {
        let shape = Shape::new(x0.len(), order);
        let comps = (0..x0.len()).map(|i| Series::variable(&shape, x0[i].clone(), i)).collect();
        TruncSeries { base: x0.to_vec(), comps }
    }

    /// Coefficients of component `j` in enumeration order.
    pub fn coeffs(&self, j: usize) -> &[Q] {
        self.comps[j].coeffs()
    }
}

/// `outer ∘ inner` as a jet at `inner.base`, truncated to the smaller order.
pub fn series_compose(outer: &TruncSeries<Q>, inner: &TruncSeries<Q>) -> Result<TruncSeries<Q>> {
    if inner.comps.len() != outer.base.len() {
        return Err(ExactError::Shape(format!(
            "inner has {} components but outer expects {} arguments",
            inner.comps.len(),
            outer.base.len()
        )));
    }
    if inner.value() != outer.base {
        return Err(ExactError::Compose("inner value differs from outer base point".into()));
    }
    let k = outer.order().min(inner.order());
    let inner = inner.truncate(k);
    let args: Vec<Series<Q>> = inner
        .comps
        .iter()
        .zip(&outer.base)
        .map(|(s, b)| s.sub(&s.from_q_like(b)))
        .collect();
    let comps = outer.comps.iter().map(|o| o.truncate(k).substitute(&args)).collect();
    Ok(TruncSeries { base: inner.base.clone(), comps })
}

/// Formal inverse of a square jet with invertible linear part.
pub fn series_invert(f: &TruncSeries<Q>) -> Result<TruncSeries<Q>> {
    let n = f.base.len();
    if f.comps.len() != n {
        return Err(ExactError::Shape("series_invert needs a square jet".into()));
    }
    if f.order() < 1 {
        return Err(ExactError::NotInvertible("order below 1 carries no linear part".into()));
    }
    let y0: Vec<Q> = f.value();
    let centered: Vec<Series<Q>> = f.comps.iter().zip(&y0).map(|(s, b)| s.sub(&s.from_q_like(b))).collect();
    let g = invert_map(&centered)?;
    let comps = g.iter().zip(&f.base).map(|(s, b)| s.add(&s.from_q_like(b))).collect();
    Ok(TruncSeries { base: y0, comps })
}

/// Inverse of a map germ `h ↦ f(h)` with `f(0) = 0`, over any ring where the
/// linear part is invertible. Returns `g` with `f(g(k)) = k` to the order of `f`.
pub fn invert_map<R: Ring>(f: &[Series<R>]) -> Result<Vec<Series<R>>> {
    let n = f.len();
    let k = f.iter().map(|s| s.order()).min().unwrap_or(-1);
    if k < 1 || f.iter().any(|s| s.shape.m != n) {
        return Err(ExactError::NotInvertible("needs a square map of order at least 1".into()));
    }
    let jac: Vec<Vec<R>> =
        (0..n).map(|i| (0..n).map(|j| f[i].coeff(&multi::unit(n, j))).collect()).collect();
    let ainv = mat_inv(&jac).ok_or_else(|| ExactError::NotInvertible("singular linear part".into()))?;
    let shape = f[0].shape.at_order(k);
    let like = f[0].like.clone();
    let kv: Vec<Series<R>> = (0..n).map(|i| Series::variable(&shape, like.clone(), i)).collect();
    // nonlinear remainder N(h) = f(h) − J h
    let nl: Vec<Series<R>> = f
        .iter()
        .map(|s| {
            let mut s = s.truncate(k);
            for j in 0..n {
                s.c[multi::index(&multi::unit(n, j))] = like.clone();
            }
            s
        })
        .collect();
    let apply = |v: &[Series<R>]| -> Vec<Series<R>> {
        (0..n)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for j in 0..n {
                    acc = acc.add(&v[j].mul_coeff(&ainv[i][j]));
                }
                acc
            })
            .collect()
    };
    let mut g = apply(&kv);
    for _ in 1..k {
        let ng: Vec<Series<R>> = nl.iter().map(|s| s.substitute(&g)).collect();
        let rhs: Vec<Series<R>> = kv.iter().zip(&ng).map(|(a, b)| a.sub(b)).collect();
        g = apply(&rhs);
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::MPoly;
    use crate::ring::{q, qf};

    fn jet1(c: &[Q]) -> TruncSeries<Q> {
        let shape = Shape::new(1, c.len() as i64 - 1);
        TruncSeries { base: vec![q(0)], comps: vec![Series::from_coeffs(&shape, &q(0), c.to_vec())] }
    }

    #[test]
    fn compose_square_after_quadratic() {
        let x = MPoly::var(1, 0);
        let outer = TruncSeries::from_polys(&[x.mul(&x)], &[q(0)], 2);
        let inner = TruncSeries::from_polys(&[x.add(&x.mul(&x))], &[q(0)], 2);
        let r = series_compose(&outer, &inner).unwrap();
        assert_eq!(r.coeffs(0), &[q(0), q(0), q(1)]);
    }

    #[test]
    fn compose_cubic_sine_like() {
        // y − y³/6 after x + x²: x + x² − x³/6 + O(x⁴), hand expansion
        let outer = jet1(&[q(0), q(1), q(0), qf(-1, 6)]);
        let inner = jet1(&[q(0), q(1), q(1), q(0)]);
        let r = series_compose(&outer, &inner).unwrap();
        assert_eq!(r.coeffs(0), &[q(0), q(1), q(1), qf(-1, 6)]);
    }

    #[test]
    fn invert_quadratic() {
        // g(x + x²) = x solved degree by degree: g = y − y² + 2y³
        let f = jet1(&[q(0), q(1), q(1), q(0)]);
        let g = series_invert(&f).unwrap();
        assert_eq!(g.coeffs(0), &[q(0), q(1), q(-1), q(2)]);
    }

    #[test]
    fn invert_singular() {
        let f = jet1(&[q(0), q(0), q(1)]);
        assert!(matches!(series_invert(&f), Err(ExactError::NotInvertible(_))));
    }

    #[test]
    fn compose_base_mismatch() {
        let a = jet1(&[q(1), q(1)]);
        let b = jet1(&[q(0), q(1)]);
        assert!(matches!(series_compose(&a, &a), Err(ExactError::Compose(_))));
        assert!(series_compose(&b, &b).is_ok());
    }

    #[test]
    fn series_inverse_of_one_plus_h() {
        let s = jet1(&[q(1), q(1), q(0), q(0)]).comps[0].clone();
        let i = s.try_inv().unwrap();
        assert_eq!(i.coeffs(), &[q(1), q(-1), q(1), q(-1)]);
    }

    #[test]
    fn derivative_lowers_order() {
        let s = jet1(&[q(1), q(2), q(3)]).comps[0].clone();
        let d = s.d(0);
        assert_eq!(d.order(), 1);
        assert_eq!(d.coeffs(), &[q(2), q(6)]);
        assert_eq!(d.d(0).d(0).order(), -1);
    }
}
