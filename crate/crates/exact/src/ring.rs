//! The commutative ring abstraction shared by every exact computation.
//!
//! Values carry their own shape (arity, truncation order), so constants are
//! produced from an existing value with the `*_like` constructors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_is_zero(x: &Q) -> bool {
    Zero::is_zero(x)
}

/// Human-readable rational: `3`, `-1/6`.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_abs(x: &Q) -> Q {
    x.abs()
}

pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_q_like(&self, c: &Q) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse when it exists in this ring.
    fn try_inv(&self) -> Option<Self>;

    fn scale(&self, c: &Q) -> Self {
        self.mul(&self.from_q_like(c))
    }
    fn pow(&self, e: u32) -> Self {
        let mut acc = self.one_like();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
    fn add_assign(&mut self, o: &Self) {
        *self = Ring::add(self, o);
    }
}

/// Rings with a rational residue modulo their nilpotent/infinitesimal part.
pub trait Local: Ring {
    fn base(&self) -> Q;
    /// The element `c` with the same shape as `self`.
    fn embed(&self, c: &Q) -> Self {
        self.from_q_like(c)
    }
}

/// Rings carrying commuting derivations along the chart coordinates.
pub trait DiffRing: Ring {
    fn deriv(&self, i: usize) -> Self;
}

impl Ring for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn from_q_like(&self, c: &Q) -> Self {
        c.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn scale(&self, c: &Q) -> Self {
        self * c
    }
}

impl Local for Q {
    fn base(&self) -> Q {
        self.clone()
    }
}

/// `re + ep·ε` with `ε² = 0`. Nesting gives several independent nilpotents
/// whose products survive (`ε₁ε₂ ≠ 0`).
#[derive(Clone, PartialEq, Debug)]
pub struct Dual<R> {
    pub re: R,
    pub ep: R,
}

impl<R: Ring> Dual<R> {
    pub fn new(re: R, ep: R) -> Self {
        Dual { re, ep }
    }
    pub fn real(re: R) -> Self {
        let ep = re.zero_like();
        Dual { re, ep }
    }
    pub fn eps_like(x: &R) -> Self {
        Dual { re: x.zero_like(), ep: x.one_like() }
    }
}

impl<R: Ring> Ring for Dual<R> {
    fn zero_like(&self) -> Self {
        Dual::real(self.re.zero_like())
    }
    fn one_like(&self) -> Self {
        Dual::real(self.re.one_like())
    }
    fn from_q_like(&self, c: &Q) -> Self {
        Dual::real(self.re.from_q_like(c))
    }
    fn add(&self, o: &Self) -> Self {
        Dual { re: self.re.add(&o.re), ep: self.ep.add(&o.ep) }
    }
    fn sub(&self, o: &Self) -> Self {
        Dual { re: self.re.sub(&o.re), ep: self.ep.sub(&o.ep) }
    }
    fn mul(&self, o: &Self) -> Self {
        Dual {
            re: self.re.mul(&o.re),
            ep: self.re.mul(&o.ep).add(&self.ep.mul(&o.re)),
        }
    }
    fn neg(&self) -> Self {
        Dual { re: self.re.neg(), ep: self.ep.neg() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.ep.is_zero()
    }
    fn try_inv(&self) -> Option<Self> {
        let a = self.re.try_inv()?;
        let ep = a.mul(&a).mul(&self.ep).neg();
        Some(Dual { re: a, ep })
    }
    fn scale(&self, c: &Q) -> Self {
        Dual { re: self.re.scale(c), ep: self.ep.scale(c) }
    }
}

impl<R: Local> Local for Dual<R> {
    fn base(&self) -> Q {
        self.re.base()
    }
}

impl<R: DiffRing> DiffRing for Dual<R> {
    fn deriv(&self, i: usize) -> Self {
        Dual { re: self.re.deriv(i), ep: self.ep.deriv(i) }
    }
}

/// Lift a vector into the dual ring with zero infinitesimal part.
pub fn lift_real<R: Ring>(v: &[R]) -> Vec<Dual<R>> {
    v.iter().map(|x| Dual::real(x.clone())).collect()
}

pub fn eps_parts<R: Ring>(v: &[Dual<R>]) -> Vec<R> {
    v.iter().map(|x| x.ep.clone()).collect()
}

pub fn re_parts<R: Ring>(v: &[Dual<R>]) -> Vec<R> {
    v.iter().map(|x| x.re.clone()).collect()
}

pub fn vec_add<R: Ring>(a: &[R], b: &[R]) -> Vec<R> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn vec_sub<R: Ring>(a: &[R], b: &[R]) -> Vec<R> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn vec_scale<R: Ring>(a: &[R], c: &R) -> Vec<R> {
    a.iter().map(|x| x.mul(c)).collect()
}

pub fn vec_is_zero<R: Ring>(a: &[R]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Inverse of a square matrix over a ring, pivoting on invertible entries.
pub fn mat_inv<R: Ring>(a: &[Vec<R>]) -> Option<Vec<Vec<R>>> {
    let n = a.len();
    if n == 0 {
        return Some(vec![]);
    }
    let proto = a[0][0].clone();
    let mut m: Vec<Vec<R>> = a.to_vec();
    let mut inv: Vec<Vec<R>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { proto.one_like() } else { proto.zero_like() }).collect())
        .collect();
    for col in 0..n {
        let mut piv = None;
        for r in col..n {
            if let Some(iv) = m[r][col].try_inv() {
                piv = Some((r, iv));
                break;
            }
        }
        let (r, iv) = piv?;
        m.swap(col, r);
        inv.swap(col, r);
        for j in 0..n {
            m[col][j] = m[col][j].mul(&iv);
            inv[col][j] = inv[col][j].mul(&iv);
        }
        for r2 in 0..n {
            if r2 != col && !m[r2][col].is_zero() {
                let f = m[r2][col].clone();
                for j in 0..n {
                    let t = m[col][j].mul(&f);
                    m[r2][j] = m[r2][j].sub(&t);
                    let t = inv[col][j].mul(&f);
                    inv[r2][j] = inv[r2][j].sub(&t);
                }
            }
        }
    }
    Some(inv)
}

pub fn mat_vec<R: Ring>(a: &[Vec<R>], v: &[R]) -> Vec<R> {
    a.iter()
        .map(|row| {
            let mut acc = v[0].zero_like();
            for (x, y) in row.iter().zip(v) {
                acc = acc.add(&x.mul(y));
            }
            acc
        })
        .collect()
}

pub fn mat_mul<R: Ring>(a: &[Vec<R>], b: &[Vec<R>]) -> Vec<Vec<R>> {
    let n = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let mut acc = row[0].zero_like();
                    for (k, x) in row.iter().enumerate() {
                        acc = acc.add(&x.mul(&b[k][j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}
