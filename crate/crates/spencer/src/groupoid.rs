//! Polynomial Lie groupoid models, jets of bisections, and bisection fields.
//!
//! An arrow is a pair `(x, g)`: its source `x ∈ Q^m` and a fiber coordinate
//! `g ∈ Q^n`. Every model is described by four polynomial maps:
//!
//! * `T(x, g)`, the target;
//! * `M(x, g₁, g₂)`, the fiber coordinate of `(T(x,g₁), g₂)·(x, g₁)`;
//! * `E(x)`, the fiber coordinate of the unit at `x`;
//! * `Inv(x, g)`, the fiber coordinate of the inverse (whose source is `T(x,g)`).
//!
//! The algebroid frame is `∂/∂g_l` along the units, so `r = n`.

use crate::algebroid::{poly_witness, AlgebroidChart, Violation};
use crate::error::{Error, Result};
use crate::jet::JetSection;
use exact_core::ring::{mat_inv, mat_vec};
use exact_core::{invert_map, multi, q, Dual, Local, MPoly, Q, Ring, Series, Shape};
use std::sync::Arc;

/// A group with polynomial law on `Q^q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Group {
    pub name: String,
    pub q: usize,
    /// `a·b` in variables `(a, b)`, arity `2q`.
    pub mul: Vec<MPoly>,
    /// `a⁻¹`, arity `q`.
    pub inv: Vec<MPoly>,
    pub unit: Vec<Q>,
}

impl Group {
    pub fn abelian(qd: usize) -> Self {
        let mul = (0..qd).map(|i| MPoly::var(2 * qd, i).add(&MPoly::var(2 * qd, qd + i))).collect();
        let inv = (0..qd).map(|i| MPoly::var(qd, i).neg()).collect();
        Group { name: "abelian".into(), q: qd, mul, inv, unit: vec![q(0); qd] }
    }

    /// `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
    pub fn heisenberg() -> Self {
        let v = |i| MPoly::var(6, i);
        let mul = vec![v(0).add(&v(3)), v(1).add(&v(4)), v(2).add(&v(5)).add(&v(0).mul(&v(4)))];
        let w = |i| MPoly::var(3, i);
        let inv = vec![w(0).neg(), w(1).neg(), w(2).neg().add(&w(0).mul(&w(1)))];
        Group { name: "heisenberg".into(), q: 3, mul, inv, unit: vec![q(0); 3] }
    }

    pub fn by_name(name: &str, qd: Option<usize>) -> Option<Self> {
        match name {
            "abelian" => Some(Group::abelian(qd.unwrap_or(1))),
            "heisenberg" => Some(Group::heisenberg()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    Pair,
    GroupBundle(Group),
    Gauge(Group),
    /// Group and action polynomials `act(h, x)` in variables `(x, h)`.
    Action(Group, Vec<MPoly>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupoidModel {
    pub name: String,
    pub kind: ModelKind,
    pub m: usize,
    pub n: usize,
    /// arity `m + n`
    pub target: Vec<MPoly>,
    /// arity `m + 2n`
    pub mul: Vec<MPoly>,
    /// arity `m`
    pub unit: Vec<MPoly>,
    /// arity `m + n`
    pub inv: Vec<MPoly>,
}

/// Substitute into a polynomial of arity `vars.len()`.
fn sub(p: &MPoly, vars: &[MPoly]) -> MPoly {
    p.compose(vars)
}

fn vars(arity: usize, range: std::ops::Range<usize>) -> Vec<MPoly> {
    range.map(|i| MPoly::var(arity, i)).collect()
}

impl GroupoidModel {
    /// `Q^m × Q^m`, arrows `(x ↦ g)`.
    pub fn pair(m: usize) -> Self {
        let a = 2 * m;
        let target = vars(a, m..2 * m);
        let mul = vars(3 * m, 2 * m..3 * m);
        let unit = vars(m, 0..m);
        let inv = vars(a, 0..m);
        GroupoidModel { name: format!("pair{m}"), kind: ModelKind::Pair, m, n: m, target, mul, unit, inv }
    }

    pub fn group_bundle(m: usize, h: Group) -> Self {
        let qd = h.q;
        let target = vars(m + qd, 0..m);
        // h₂·h₁
        let a = m + 2 * qd;
        let mut args = vars(a, m + qd..m + 2 * qd);
        args.extend(vars(a, m..m + qd));
        let mul = h.mul.iter().map(|p| sub(p, &args)).collect();
        let unit = h.unit.iter().map(|c| MPoly::constant(m, c.clone())).collect();
        let inv = h.inv.iter().map(|p| sub(p, &vars(m + qd, m..m + qd))).collect();
        let name = format!("groupbundle-{}", h.name);
        GroupoidModel { name, kind: ModelKind::GroupBundle(h), m, n: qd, target, mul, unit, inv }
    }

    /// Fiber `(z, h)`: arrows `x ↦ z` labelled by `h`, `(z,h₂,y)(y,h₁,x) = (z,h₂h₁,x)`.
    pub fn gauge(m: usize, h: Group) -> Self {
        let qd = h.q;
        let n = m + qd;
        let target = vars(m + n, m..2 * m);
        let a = m + 2 * n;
        let mut args = vars(a, m + n + m..m + 2 * n);
        args.extend(vars(a, m + m..m + n));
        let mut mul = vars(a, m + n..m + n + m);
        mul.extend(h.mul.iter().map(|p| sub(p, &args)));
        let mut unit = vars(m, 0..m);
        unit.extend(h.unit.iter().map(|c| MPoly::constant(m, c.clone())));
        let mut inv = vars(m + n, 0..m);
        inv.extend(h.inv.iter().map(|p| sub(p, &vars(m + n, 2 * m..m + n))));
        let name = format!("gauge-{}", h.name);
        GroupoidModel { name, kind: ModelKind::Gauge(h), m, n, target, mul, unit, inv }
    }

    /// Action groupoid of `act(h, x)` given in variables `(x₁..x_m, h₁..h_q)`.
    pub fn action(m: usize, h: Group, act: Vec<MPoly>) -> Self {
        let qd = h.q;
        assert_eq!(act.len(), m);
        let target = act.clone();
        let a = m + 2 * qd;
        let mut args = vars(a, m + qd..m + 2 * qd);
        args.extend(vars(a, m..m + qd));
        let mul = h.mul.iter().map(|p| sub(p, &args)).collect();
        let unit = h.unit.iter().map(|c| MPoly::constant(m, c.clone())).collect();
        let inv = h.inv.iter().map(|p| sub(p, &vars(m + qd, m..m + qd))).collect();
        let name = format!("action-{}", h.name);
        GroupoidModel { name, kind: ModelKind::Action(h, act), m, n: qd, target, mul, unit, inv }
    }

    /// The Heisenberg group acting on the plane by
    /// `(a,b,c)·(x₁,x₂) = (x₁ + a x₂ + c, x₂ + b)`.
    pub fn unipotent_action() -> Self {
        let v = |i| MPoly::var(5, i);
        let act = vec![v(0).add(&v(2).mul(&v(1))).add(&v(4)), v(1).add(&v(3))];
        GroupoidModel::action(2, Group::heisenberg(), act)
    }

    /// Variable names for `(x, g₁, g₂, g₃)`.
    fn names(&self) -> Vec<String> {
        let mut out: Vec<String> = (1..=self.m).map(|i| format!("x{i}")).collect();
        for p in ["g", "h", "k"] {
            out.extend((1..=self.n).map(|j| format!("{p}{j}")));
        }
        out
    }

    /// Checks the groupoid axioms as polynomial identities in `(x, g₁, g₂, g₃)`.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let (m, n) = (self.m, self.n);
        let a = m + 3 * n;
        let x = vars(a, 0..m);
        let g1 = vars(a, m..m + n);
        let g2 = vars(a, m + n..m + 2 * n);
        let g3 = vars(a, m + 2 * n..m + 3 * n);
        let cat = |parts: &[&[MPoly]]| -> Vec<MPoly> { parts.iter().flat_map(|p| p.iter().cloned()).collect() };
        let t = |xx: &[MPoly], g: &[MPoly]| -> Vec<MPoly> { self.target.iter().map(|p| sub(p, &cat(&[xx, g]))).collect() };
        let mu = |xx: &[MPoly], ga: &[MPoly], gb: &[MPoly]| -> Vec<MPoly> {
            self.mul.iter().map(|p| sub(p, &cat(&[xx, ga, gb]))).collect()
        };
        let e = |xx: &[MPoly]| -> Vec<MPoly> { self.unit.iter().map(|p| sub(p, xx)).collect() };
        let inv = |xx: &[MPoly], g: &[MPoly]| -> Vec<MPoly> { self.inv.iter().map(|p| sub(p, &cat(&[xx, g]))).collect() };
        let names = self.names();
        let check = |identity: &str, lhs: Vec<MPoly>, rhs: Vec<MPoly>| -> std::result::Result<(), Violation> {
            for (i, (l, r)) in lhs.iter().zip(&rhs).enumerate() {
                let d = l.sub(r);
                if !d.is_zero() {
                    return Err(Violation {
                        identity: identity.into(),
                        witness: poly_witness(&d, &names, &format!("difference in component {}", i + 1)),
                    });
                }
            }
            Ok(())
        };
        let y = t(&x, &g1);
        check("target of a unit", t(&x, &e(&x)), x.clone())?;
        check("target of a product", t(&x, &mu(&x, &g1, &g2)), t(&y, &g2))?;
        check("left unit law", mu(&x, &e(&x), &g1), g1.clone())?;
        check("right unit law", mu(&x, &g1, &e(&y)), g1.clone())?;
        let gi = inv(&x, &g1);
        check("target of an inverse", t(&y, &gi), x.clone())?;
        check("inverse after arrow", mu(&x, &g1, &gi), e(&x))?;
        check("arrow after inverse", mu(&y, &gi, &g1), e(&y))?;
        let lhs = mu(&x, &g1, &mu(&y, &g2, &g3));
        let rhs = mu(&x, &mu(&x, &g1, &g2), &g3);
        check("associativity", lhs, rhs)?;
        Ok(())
    }

    pub fn target_at<R: Ring>(&self, x: &[R], g: &[R]) -> Vec<R> {
        let args: Vec<R> = x.iter().chain(g).cloned().collect();
        let like = args[0].zero_like();
        self.target.iter().map(|p| p.eval(&args, &like)).collect()
    }

    pub fn mul_at<R: Ring>(&self, x: &[R], g1: &[R], g2: &[R]) -> Vec<R> {
        let args: Vec<R> = x.iter().chain(g1).chain(g2).cloned().collect();
        let like = args[0].zero_like();
        self.mul.iter().map(|p| p.eval(&args, &like)).collect()
    }

    pub fn unit_at<R: Ring>(&self, x: &[R]) -> Vec<R> {
        let like = x[0].zero_like();
        self.unit.iter().map(|p| p.eval(x, &like)).collect()
    }

    pub fn inv_at<R: Ring>(&self, x: &[R], g: &[R]) -> Vec<R> {
        let args: Vec<R> = x.iter().chain(g).cloned().collect();
        let like = args[0].zero_like();
        self.inv.iter().map(|p| p.eval(&args, &like)).collect()
    }

    /// Anchor and structure functions of the algebroid along the units.
    ///
    /// The anchor is `∂T/∂g_l` at the unit. The structure functions are the
    /// commutators of right-invariant extensions at the unit, read off as the
    /// `ε₁ε₂` part of `M(x, E+ε₁e_l, E(T(x, E+ε₁e_l)) + ε₂e_p)` minus the swap.
    pub fn extract_algebroid(&self) -> AlgebroidChart {
        let (m, n) = (self.m, self.n);
        let xs: Vec<MPoly> = vars(m, 0..m);
        let e = self.unit_at(&xs);
        let mut args = xs.clone();
        args.extend(e.iter().cloned());
        let anchor: Vec<Vec<MPoly>> =
            (0..m).map(|i| (0..n).map(|l| self.target[i].deriv(m + l).compose(&args)).collect()).collect();
        type D2 = Dual<Dual<MPoly>>;
        let zero = MPoly::zero(m);
        let lift = |p: &MPoly| -> D2 { Dual::real(Dual::real(p.clone())) };
        let e1: D2 = Dual::real(Dual::new(zero.clone(), MPoly::one(m)));
        let e2: D2 = Dual::new(Dual::real(zero.clone()), Dual::real(MPoly::one(m)));
        let xd: Vec<D2> = xs.iter().map(lift).collect();
        let ed: Vec<D2> = e.iter().map(lift).collect();
        let mut raw = vec![vec![vec![zero.clone(); n]; n]; n];
        for l in 0..n {
            let mut g1 = ed.clone();
            g1[l] = g1[l].add(&e1);
            let y = self.target_at(&xd, &g1);
            let ey = self.unit_at(&y);
            for p in 0..n {
                let mut g2 = ey.clone();
                g2[p] = g2[p].add(&e2);
                let prod = self.mul_at(&xd, &g1, &g2);
                for nn in 0..n {
                    raw[nn][l][p] = prod[nn].ep.ep.clone();
                }
            }
        }
        let c = (0..n)
            .map(|nn| (0..n).map(|l| (0..n).map(|p| raw[nn][l][p].sub(&raw[nn][p][l])).collect()).collect())
            .collect();
        AlgebroidChart::new(&self.name, m, n, anchor, c)
    }

    /// Commutators of the right-invariant vector fields on a source fiber,
    /// computed symbolically and restricted to the units.
    pub fn right_invariant_commutators(&self) -> Vec<Vec<Vec<MPoly>>> {
        let (m, n) = (self.m, self.n);
        let a = m + n;
        let x = vars(a, 0..m);
        let g = vars(a, m..a);
        let tgt: Vec<MPoly> = self.target.iter().map(|p| p.compose(&[x.clone(), g.clone()].concat())).collect();
        let ey: Vec<MPoly> = self.unit.iter().map(|p| p.compose(&tgt)).collect();
        let args: Vec<MPoly> = [x.clone(), g.clone(), ey].concat();
        // fields[l][j] = ∂M_j/∂g2_l at (x, g, E(T(x,g)))
        let fields: Vec<Vec<MPoly>> =
            (0..n).map(|l| (0..n).map(|j| self.mul[j].deriv(m + n + l).compose(&args)).collect()).collect();
        let mut at_unit = vars(m, 0..m);
        at_unit.extend(self.unit.iter().cloned());
        (0..n)
            .map(|nn| {
                (0..n)
                    .map(|l| {
                        (0..n)
                            .map(|p| {
                                let mut acc = MPoly::zero(a);
                                for j in 0..n {
                                    acc = acc.add(&fields[l][j].mul(&fields[p][nn].deriv(m + j)));
                                    acc = acc.sub(&fields[p][j].mul(&fields[l][nn].deriv(m + j)));
                                }
                                acc.compose(&at_unit)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
}
}

/// An arrow `(x, g)` with coordinates in `R`; with `R = Dual<_>` it is a
/// point together with a tangent vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Arrow<R> {
    pub x: Vec<R>,
    pub g: Vec<R>,
}

/// `Σ c_α d^α` for a nilpotent or otherwise exact offset `d`.
pub fn series_eval<R: Ring>(s: &Series<R>, d: &[R]) -> R {
    let mut acc = s.like().clone();
    for (a, c) in s.shape().mis.iter().zip(s.coeffs()) {
        if c.is_zero() {
            continue;
        }
        let mut t = c.clone();
        for (i, &e) in a.iter().enumerate() {
            if e > 0 {
                t = t.mul(&d[i].pow(e));
            }
        }
        acc = acc.add(&t);
    }
    acc
}

/// The `k`-jet at `x` of a local bisection: `c_j(h)` is the fiber coordinate
/// of a representative at `x + h`, truncated at order `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct JetBisection<R> {
    pub k: i64,
    pub x: Vec<R>,
    pub c: Vec<Series<R>>,
}

fn point_series<R: Ring>(x: &[R], k: i64) -> Vec<Series<R>> {
    let shape = Shape::new(x.len(), k);
    (0..x.len()).map(|i| Series::variable(&shape, x[i].clone(), i)).collect()
}

impl<R: Ring> JetBisection<R> {
    pub fn identity(model: &GroupoidModel, x: &[R], k: i64) -> Self {
        let xs = point_series(x, k);
        JetBisection { k, x: x.to_vec(), c: model.unit_at(&xs) }
    }

    pub fn like(&self) -> R {
        self.x[0].zero_like()
    }

    /// Fiber coordinate of the arrow at the base point.
    pub fn value(&self) -> Vec<R> {
        self.c.iter().map(|s| s.value()).collect()
    }

    /// `x + h ↦ T(x+h, c(h))`.
    pub fn target_series(&self, model: &GroupoidModel) -> Vec<Series<R>> {
        model.target_at(&point_series(&self.x, self.k), &self.c)
    }

    pub fn target(&self, model: &GroupoidModel) -> Vec<R> {
        model.target_at(&self.x, &self.value())
    }

    /// Jacobian of the representative's target map at the base point.
    pub fn target_jacobian(&self, model: &GroupoidModel) -> Vec<Vec<R>> {
        assert!(self.k >= 1, "target jacobian needs order 1");
        let ts = self.target_series(model);
        let m = self.x.len();
        ts.iter().map(|s| (0..m).map(|i| s.coeff(&multi::unit(m, i))).collect()).collect()
    }

    pub fn truncate(&self, k: i64) -> Self {
        JetBisection { k: k.min(self.k), x: self.x.clone(), c: self.c.iter().map(|s| s.truncate(k)).collect() }
    }

    /// `Y·X`, defined when `Y` sits at the target of `X`.
    pub fn compose(model: &GroupoidModel, y: &Self, x: &Self) -> Result<Self> {
        let k = y.k.min(x.k);
        let (y, x) = (y.truncate(k), x.truncate(k));
        let phi = x.target_series(model);
        let tgt: Vec<R> = phi.iter().map(|s| s.value()).collect();
        if tgt != y.x {
            return Err(Error::Compose("left factor does not sit at the target of the right factor".into()));
        }
        let args: Vec<Series<R>> = phi.iter().zip(&tgt).map(|(s, t)| s.sub(&Series::constant(s.shape(), t.clone()))).collect();
        let yc: Vec<Series<R>> = y.c.iter().map(|s| s.substitute(&args)).collect();
        let c = model.mul_at(&point_series(&x.x, k), &x.c, &yc);
        Ok(JetBisection { k, x: x.x.clone(), c })
    }

    /// `F⁻¹(y) = F(f⁻¹(y))⁻¹` as a jet at the target.
    pub fn invert(&self, model: &GroupoidModel) -> Result<Self> {
        if self.k < 1 {
            // order zero: just the inverse arrow
            let c0 = self.value();
            let y = self.target(model);
            let inv = model.inv_at(&self.x, &c0);
            let shape = Shape::new(self.x.len(), 0);
            let c = inv.into_iter().map(|v| Series::constant(&shape, v)).collect();
            return Ok(JetBisection { k: self.k, x: y, c });
        }
        let phi = self.target_series(model);
        let y: Vec<R> = phi.iter().map(|s| s.value()).collect();
        let centered: Vec<Series<R>> = phi.iter().zip(&y).map(|(s, t)| s.sub(&Series::constant(s.shape(), t.clone()))).collect();
        let psi = invert_map(&centered).map_err(|_| Error::NotInvertible("target map has a singular jacobian".into()))?;
        let xs: Vec<Series<R>> = psi.iter().zip(&self.x).map(|(p, xi)| p.add(&Series::constant(p.shape(), xi.clone()))).collect();
        let cs: Vec<Series<R>> = self.c.iter().map(|s| s.substitute(&psi)).collect();
        let c = model.inv_at(&xs, &cs);
        Ok(JetBisection { k: self.k, x: y, c })
    }

    /// The same representative re-expanded at `z` (with `z − x` nilpotent)
    /// and truncated at order `k`.
    pub fn shift(&self, z: &[R], k: i64) -> Self {
        // the offset has a nonzero constant term, so expand at full order first
        let shape = Shape::new(self.x.len(), self.k);
        let args: Vec<Series<R>> =
            z.iter().zip(&self.x).enumerate().map(|(i, (zi, xi))| Series::variable(&shape, zi.sub(xi), i)).collect();
        let c = self.c.iter().map(|s| s.substitute(&args).truncate(k)).collect();
        JetBisection { k, x: z.to_vec(), c }
    }

    /// The arrow at the base point.
    pub fn arrow(&self) -> Arrow<R> {
        Arrow { x: self.x.clone(), g: self.value() }
    }
}

impl<S: Ring> JetBisection<Dual<S>> {
    /// Jet coordinates of the vertical part of the tangent vector carried by
    /// an `ε`-perturbation of a unit jet: `α!·ε(c_α − c_α(I_k(source)))`.
    pub fn vertical(&self, model: &GroupoidModel) -> JetSection<S> {
        let id = JetBisection::identity(model, &self.x, self.k);
        let m = self.x.len();
        let r = self.c.len();
        let mis = multi::list_upto(m, self.k);
        let mut u = Vec::with_capacity(mis.len() * r);
        for a in &mis {
            let f = multi::factorial(a);
            for l in 0..r {
                let d = self.c[l].coeff(a).sub(&id.c[l].coeff(a));
                u.push(d.ep.scale(&f));
            }
        }
        JetSection::from_vec(m, r, self.k, u)
    }

    /// `I_k(x) + εξ`: the curve of jets generated by `ξ` at a real point.
    pub fn unit_plus(model: &GroupoidModel, x: &[S], xi: &JetSection<S>) -> Self {
        let xd: Vec<Dual<S>> = x.iter().map(|v| Dual::real(v.clone())).collect();
        let mut j = JetBisection::identity(model, &xd, xi.k);
        let shape = j.c[0].shape().clone();
        for (l, s) in j.c.iter_mut().enumerate() {
            let coeffs: Vec<Dual<S>> = shape
                .mis
                .iter()
                .zip(s.coeffs())
                .map(|(a, c)| Dual::new(c.re.clone(), c.ep.add(&xi.get(a, l).scale(&multi::factorial(a).recip()))))
                .collect();
            *s = Series::from_coeffs(&shape, &xd[0], coeffs);
        }
        j
    }
}

/// A field of `(k)`-jets of bisections over the chart.
#[derive(Clone, Debug)]
pub enum BisectionField {
    /// `coeffs[index(α)][j]` is the Taylor coefficient `c_{α,j}(x, p)` in the
    /// chart variables followed by `np` parameters. Non-holonomic in general.
    Jets { k: i64, np: usize, coeffs: Vec<Vec<MPoly>> },
    /// `(a·b)(x) = a(f_b(x))·b(x)`.
    Compose(Box<BisectionField>, Box<BisectionField>),
    /// `σ⁻¹`, evaluable near `f(x0)`.
    Inverse { inner: Box<BisectionField>, x0: Vec<Q> },
}

impl BisectionField {
    pub fn order(&self) -> i64 {
        match self {
            BisectionField::Jets { k, .. } => *k,
            BisectionField::Compose(a, b) => a.order().min(b.order()),
            BisectionField::Inverse { inner, .. } => inner.order(),
        }
    }

    /// The identity field of order `k`.
    pub fn identity(model: &GroupoidModel, k: i64) -> Self {
        BisectionField::holonomic(model, &model.unit, k)
    }

    /// `j^k` of the global bisection `x ↦ (x, g(x))`.
    pub fn holonomic(model: &GroupoidModel, g: &[MPoly], k: i64) -> Self {
        let m = model.m;
        let coeffs = multi::list_upto(m, k)
            .iter()
            .map(|a| g.iter().map(|p| p.deriv_mi(a).scale(&multi::factorial(a).recip())).collect())
            .collect();
        BisectionField::Jets { k, np: 0, coeffs }
    }

    /// Add `p` to the Taylor coefficient `(α, j)`; `p` has the field's arity.
    pub fn perturb(&mut self, a: &[u32], j: usize, p: &MPoly) {
        let BisectionField::Jets { coeffs, .. } = self else { panic!("perturb needs explicit jets") };
        let i = multi::index(a);
        coeffs[i][j] = coeffs[i][j].add(p);
    }

    /// Extend the coefficient arity by `np` parameters.
    pub fn with_params(&self, np: usize) -> Self {
        match self {
            BisectionField::Jets { k, np: old, coeffs } => {
                assert_eq!(*old, 0);
                let ar = coeffs.first().and_then(|c| c.first()).map(|p| p.arity()).unwrap_or(0);
                let map: Vec<usize> = (0..ar).collect();
                let coeffs = coeffs.iter().map(|row| row.iter().map(|p| p.reindex(ar + np, &map)).collect()).collect();
                BisectionField::Jets { k: *k, np, coeffs }
            }
            _ => panic!("parameters only on explicit jets"),
        }
    }

    /// Evaluate at a point in `R`, with parameter values.
    pub fn eval<R: Local>(&self, model: &GroupoidModel, x: &[R], params: &[R]) -> Result<JetBisection<R>> {
        match self {
            BisectionField::Jets { k, np, coeffs } => {
                assert_eq!(params.len(), *np, "parameter count");
                let args: Vec<R> = x.iter().chain(params).cloned().collect();
                let like = x[0].zero_like();
                let shape = Shape::new(model.m, *k);
                let c = (0..model.n)
                    .map(|j| {
                        let cs = coeffs.iter().map(|row| row[j].eval(&args, &like)).collect();
                        Series::from_coeffs(&shape, &like, cs)
                    })
                    .collect();
                Ok(JetBisection { k: *k, x: x.to_vec(), c })
            }
            BisectionField::Compose(a, b) => {
                let xb = b.eval(model, x, params)?;
                let y = xb.target(model);
                let ya = a.eval(model, &y, params)?;
                JetBisection::compose(model, &ya, &xb)
            }
            BisectionField::Inverse { inner, x0 } => {
                let xp = inner.preimage(model, x, x0, params)?;
                inner.eval(model, &xp, params)?.invert(model)
            }
        }
    }

    /// Point map `x ↦ f(x)`.
    pub fn target_at<R: Local>(&self, model: &GroupoidModel, x: &[R], params: &[R]) -> Result<Vec<R>> {
        Ok(self.eval(model, x, params)?.truncate(0).target(model))
    }

    /// Solve `f(x') = y` for `x'` with residue `x0`, by Newton steps with the
    /// rational jacobian at `x0`; exact once the nilpotent parts are exhausted.
    pub fn preimage<R: Local>(&self, model: &GroupoidModel, y: &[R], x0: &[Q], params: &[R]) -> Result<Vec<R>> {
        let m = model.m;
        let base_params: Vec<Dual<Q>> = params.iter().map(|p| Dual::real(p.base())).collect();
        let jac: Vec<Vec<Q>> = {
            let cols: Vec<Vec<Q>> = (0..m)
                .map(|i| {
                    let xd: Vec<Dual<Q>> = x0
                        .iter()
                        .enumerate()
                        .map(|(j, v)| Dual::new(v.clone(), q((i == j) as i64)))
                        .collect();
                    self.target_at(model, &xd, &base_params).map(|t| t.iter().map(|d| d.ep.clone()).collect())
                })
                .collect::<Result<_>>()?;
            (0..m).map(|r| (0..m).map(|c| cols[c][r].clone()).collect()).collect()
        };
        let jinv = mat_inv(&jac).ok_or_else(|| Error::NotInvertible("point map has a singular jacobian".into()))?;
        let like = y[0].zero_like();
        let jinv_r: Vec<Vec<R>> = jinv.iter().map(|row| row.iter().map(|c| like.from_q_like(c)).collect()).collect();
        let mut x: Vec<R> = x0.iter().map(|c| like.from_q_like(c)).collect();
        for _ in 0..64 {
            let fx = self.target_at(model, &x, params)?;
            let res: Vec<R> = fx.iter().zip(y).map(|(a, b)| a.sub(b)).collect();
            if res.iter().all(|v| v.is_zero()) {
                return Ok(x);
            }
            if res.iter().any(|v| v.base() != q(0)) {
                return Err(Error::NotInvertible("point is outside the germ of the inverse".into()));
            }
            let step = mat_vec(&jinv_r, &res);
            x = x.iter().zip(&step).map(|(a, b)| a.sub(b)).collect();
        }
        Err(Error::NotInvertible("Newton iteration did not terminate".into()))
    }
}

/// A shared model handle.
pub type ModelRef = Arc<GroupoidModel>;

#[cfg(test)]
mod tests {
    use super::*;
    use exact_core::qf;

    fn models() -> Vec<GroupoidModel> {
        vec![
            GroupoidModel::pair(1),
            GroupoidModel::pair(2),
            GroupoidModel::group_bundle(1, Group::abelian(2)),
            GroupoidModel::group_bundle(1, Group::heisenberg()),
            GroupoidModel::gauge(1, Group::abelian(1)),
            GroupoidModel::gauge(1, Group::heisenberg()),
            GroupoidModel::unipotent_action(),
        ]
    }

    #[test]
    fn shipped_models_are_groupoids() {
        for m in models() {
            assert_eq!(m.validate(), Ok(()), "{}", m.name);
            let alg = m.extract_algebroid();
            assert_eq!(alg.validate(), Ok(()), "{}", m.name);
        }
    }

    #[test]
    fn non_action_is_rejected() {
        // x + h² is not an action of (Q, +)
        let act = vec![MPoly::var(2, 0).add(&MPoly::var(2, 1).pow(2))];
        let bad = GroupoidModel::action(1, Group::abelian(1), act);
        let v = bad.validate().unwrap_err();
        assert_eq!(v.identity, "target of a product");
        assert!(v.witness.contains("g1*h1"), "{}", v.witness);
    }

    #[test]
    fn pair_gives_tangent_algebroid() {
        for m in 1..=2 {
            assert_eq!(GroupoidModel::pair(m).extract_algebroid(), AlgebroidChart::tangent(m));
        }
        let ab = GroupoidModel::group_bundle(2, Group::abelian(2)).extract_algebroid();
        assert_eq!(ab, AlgebroidChart::abelian(2, 2));
    }

    #[test]
    fn heisenberg_structure_constants() {
        let alg = GroupoidModel::group_bundle(1, Group::heisenberg()).extract_algebroid();
        // only [e1, e2] is nonzero, along e3
        for nn in 0..3 {
            for l in 0..3 {
                for p in 0..3 {
                    let want = match (nn, l, p) {
                        (2, 0, 1) => qf(-1, 1),
                        (2, 1, 0) => qf(1, 1),
                        _ => qf(0, 1),
                    };
                    assert_eq!(alg.c[nn][l][p], MPoly::constant(1, want), "c^{nn}_{l}{p}");
                }
            }
        }
    }

    #[test]
    fn compose_and_invert_jets() {
        let model = GroupoidModel::pair(1);
        // f(x) = x + x² near 0, k = 3
        let x = MPoly::var(1, 0);
        let g = vec![x.add(&x.mul(&x))];
        let f = BisectionField::holonomic(&model, &g, 3);
        let j = f.eval(&model, &[q(0)], &[]).unwrap();
        let inv = j.invert(&model).unwrap();
        assert_eq!(inv.c[0].coeffs(), &[q(0), q(1), q(-1), q(2)]);
        let back = inv.invert(&model).unwrap();
        assert_eq!(back, j);
        let id = JetBisection::compose(&model, &inv, &j).unwrap();
        assert_eq!(id, JetBisection::identity(&model, &[q(0)], 3));
        // chain rule on slopes
        let h = BisectionField::holonomic(&model, &[x.scale(&q(3))], 1).eval(&model, &[q(0)], &[]).unwrap();
        let hf = JetBisection::compose(&model, &h, &j.truncate(1)).unwrap();
        assert_eq!(hf.c[0].coeffs(), &[q(0), q(3)]);
        let err = JetBisection::compose(&model, &h.shift(&[q(0)], 1), &f.eval(&model, &[q(1)], &[]).unwrap().truncate(1));
        assert!(matches!(err, Err(Error::Compose(_))));
    }

    #[test]
    fn gauge_group_parts_add() {
        let model = GroupoidModel::gauge(1, Group::abelian(1));
        let x = MPoly::var(1, 0);
        let a = BisectionField::holonomic(&model, &[x.scale(&q(2)), x.mul(&x)], 1);
        let b = BisectionField::holonomic(&model, &[x.add(&MPoly::one(1)), x.clone()], 1);
        let ab = BisectionField::Compose(Box::new(a), Box::new(b));
        let j = ab.eval(&model, &[q(1)], &[]).unwrap();
        // z = 2(x+1), h = (x+1)² + x
        assert_eq!(j.c[0].coeffs(), &[q(4), q(2)]);
        assert_eq!(j.c[1].coeffs(), &[q(5), q(5)]);
    }

    #[test]
    fn inverse_field_round_trip() {
        let model = GroupoidModel::unipotent_action();
        let v = |i| MPoly::var(2, i);
        let g = vec![v(1), v(0).mul(&v(1)), v(0).add(&MPoly::one(2))];
        let f = BisectionField::holonomic(&model, &g, 2);
        let x0 = vec![qf(1, 2), qf(-1, 3)];
        let y0 = f.target_at(&model, &x0, &[]).unwrap();
        let finv = BisectionField::Inverse { inner: Box::new(f.clone()), x0: x0.clone() };
        let comp = BisectionField::Compose(Box::new(finv), Box::new(f));
        let j = comp.eval(&model, &x0, &[]).unwrap();
        assert_eq!(j, JetBisection::identity(&model, &x0, 2));
        assert!(y0 != x0);
    }

    #[test]
    fn extraction_matches_right_invariant_commutators() {
        for model in models() {
            assert_eq!(model.extract_algebroid().c, model.right_invariant_commutators(), "{}", model.name);
        }
    }
}
