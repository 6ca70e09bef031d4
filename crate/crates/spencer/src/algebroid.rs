//! Lie algebroids over a polynomial chart: anchor `a^i_l`, structure
//! functions `c^n_{lp}` of the frame, the section bracket, and validation.

use crate::coef::{symbolic_coords, Coef};
use crate::ptable::PTable;
use exact_core::{multi, MPoly, Q, Series};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

pub struct AlgebroidChart {
    pub name: String,
    pub m: usize,
    pub r: usize,
    /// `anchor[i][l] = a^i_l`
    pub anchor: Vec<Vec<MPoly>>,
    /// `c[n][l][p] = c^n_{lp}`
    pub c: Vec<Vec<Vec<MPoly>>>,
    ptables: Mutex<HashMap<i64, Arc<PTable>>>,
}

impl Clone for AlgebroidChart {
    fn clone(&self) -> Self {
        AlgebroidChart::new(&self.name, self.m, self.r, self.anchor.clone(), self.c.clone())
    }
}

impl fmt::Debug for AlgebroidChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebroidChart({}, m={}, r={})", self.name, self.m, self.r)
    }
}

impl PartialEq for AlgebroidChart {
    fn eq(&self, o: &Self) -> bool {
        self.m == o.m && self.r == o.r && self.anchor == o.anchor && self.c == o.c
    }
}

/// First identity that fails, with a monomial witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub identity: String,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.identity, self.witness)
    }
}

pub(crate) fn poly_witness(p: &MPoly, names: &[String], what: &str) -> String {
    match p.leading() {
        Some((mono, c)) => {
            let t = MPoly::monomial(p.arity(), mono.clone(), c.clone());
            format!("{what} has term {}", t.to_string_with(names))
        }
        None => format!("{what} vanishes"),
    }
}

impl AlgebroidChart {
    pub fn new(name: &str, m: usize, r: usize, anchor: Vec<Vec<MPoly>>, c: Vec<Vec<Vec<MPoly>>>) -> Self {
        assert_eq!(anchor.len(), m);
        assert!(anchor.iter().all(|row| row.len() == r));
        assert_eq!(c.len(), r);
        AlgebroidChart { name: name.to_string(), m, r, anchor, c, ptables: Mutex::new(HashMap::new()) }
    }

    /// `TI` itself: frame `∂_i`, anchor the identity, `c = 0`.
    pub fn tangent(m: usize) -> Self {
        let anchor = (0..m)
            .map(|i| (0..m).map(|l| MPoly::constant(m, exact_core::q((i == l) as i64))).collect())
            .collect();
        AlgebroidChart::new("tangent", m, m, anchor, zero_c(m, m))
    }

    /// Trivial bundle of abelian Lie algebras.
    pub fn abelian(m: usize, r: usize) -> Self {
        AlgebroidChart::new("abelian", m, r, vec![vec![MPoly::zero(m); r]; m], zero_c(m, r))
    }

    /// Bundle of Lie algebras with constant structure constants `consts[n][l][p]`.
    pub fn lie_bundle(name: &str, m: usize, consts: &[Vec<Vec<Q>>]) -> Self {
        let r = consts.len();
        let c = consts
            .iter()
            .map(|cn| cn.iter().map(|row| row.iter().map(|v| MPoly::constant(m, v.clone())).collect()).collect())
            .collect();
        AlgebroidChart::new(name, m, r, vec![vec![MPoly::zero(m); r]; m], c)
    }

    /// Trivial bundle of `so₃`: `[e₁,e₂] = e₃` cyclically.
    pub fn so3_bundle(m: usize) -> Self {
        let q = exact_core::q;
        let consts = vec![
            vec![vec![q(0), q(0), q(0)], vec![q(0), q(0), q(1)], vec![q(0), q(-1), q(0)]],
            vec![vec![q(0), q(0), q(-1)], vec![q(0), q(0), q(0)], vec![q(1), q(0), q(0)]],
            vec![vec![q(0), q(1), q(0)], vec![q(-1), q(0), q(0)], vec![q(0), q(0), q(0)]],
        ];
        AlgebroidChart::lie_bundle("so3", m, &consts)
    }

    /// `sl₂` acting on the line: anchors `∂, x∂, x²∂`.
    pub fn sl2_line() -> Self {
        let x = MPoly::var(1, 0);
        let anchor = vec![vec![MPoly::one(1), x.clone(), x.mul(&x)]];
        let mut c = zero_c(1, 3);
        let mut set = |n: usize, l: usize, p: usize, v: i64| {
            c[n][l][p] = MPoly::constant(1, exact_core::q(v));
            c[n][p][l] = MPoly::constant(1, exact_core::q(-v));
        };
        set(0, 0, 1, 1);
        set(1, 0, 2, 2);
        set(2, 1, 2, 1);
        AlgebroidChart::new("sl2-line", 1, 3, anchor, c)
    }

    pub fn names(&self) -> Vec<String> {
        MPoly::default_names(self.m)
    }

    /// Coefficient table of the jet-jet part of the first bracket at order `k`.
    pub fn ptable(&self, k: i64) -> Arc<PTable> {
        let mut g = self.ptables.lock().unwrap();
        g.entry(k).or_insert_with(|| Arc::new(PTable::build(self, k))).clone()
    }

    /// Checks antisymmetry, the anchor morphism, Jacobi on the frame and the
    /// Leibniz rule, all as polynomial identities.
    pub fn validate(&self) -> Result<(), Violation> {
        let (m, r) = (self.m, self.r);
        let names = self.names();
        for n in 0..r {
            for l in 0..r {
                for p in l..r {
                    let s = self.c[n][l][p].add(&self.c[n][p][l]);
                    if !s.is_zero() {
                        return Err(Violation {
                            identity: "antisymmetry of structure functions".into(),
                            witness: poly_witness(&s, &names, &format!("c^{}_{{{}{}}} + c^{}_{{{}{}}}", n + 1, l + 1, p + 1, n + 1, p + 1, l + 1)),
                        });
                    }
                }
            }
        }
        let ch = Chart::symbolic(self);
        let frame: Vec<Vec<MPoly>> =
            (0..r).map(|l| (0..r).map(|n| MPoly::constant(m, exact_core::q((n == l) as i64))).collect()).collect();
        for l in 0..r {
            for p in l + 1..r {
                let lhs = ch.anchor_apply(&ch.bracket(&frame[l], &frame[p]));
                let rhs = ch.vf_bracket(&ch.anchor_apply(&frame[l]), &ch.anchor_apply(&frame[p]));
                for i in 0..m {
                    let d = lhs[i].sub(&rhs[i]);
                    if !d.is_zero() {
                        return Err(Violation {
                            identity: "anchor is a bracket morphism".into(),
                            witness: poly_witness(&d, &names, &format!("frame pair ({},{}), component {}", l + 1, p + 1, i + 1)),
                        });
                    }
                }
            }
        }
        for l in 0..r {
            for p in l + 1..r {
                for s in p + 1..r {
                    let (a, b, c) = (&frame[l], &frame[p], &frame[s]);
                    let j1 = ch.bracket(&ch.bracket(a, b), c);
                    let j2 = ch.bracket(&ch.bracket(b, c), a);
                    let j3 = ch.bracket(&ch.bracket(c, a), b);
                    for n in 0..r {
                        let d = j1[n].add(&j2[n]).add(&j3[n]);
                        if !d.is_zero() {
                            return Err(Violation {
                                identity: "Jacobi identity".into(),
                                witness: poly_witness(
                                    &d,
                                    &names,
                                    &format!("frame triple ({},{},{}), component {}", l + 1, p + 1, s + 1, n + 1),
                                ),
                            });
                        }
                    }
                }
            }
        }
        if m > 0 {
            let f = MPoly::var(m, 0);
            for l in 0..r {
                for p in 0..r {
                    let fx: Vec<MPoly> = frame[l].iter().map(|v| v.mul(&f)).collect();
                    let lhs = ch.bracket(&fx, &frame[p]);
                    let br = ch.bracket(&frame[l], &frame[p]);
                    let eta_f = ch.vf_apply(&ch.anchor_apply(&frame[p]), &f);
                    for n in 0..r {
                        let rhs = f.mul(&br[n]).sub(&eta_f.mul(&frame[l][n]));
                        let d = lhs[n].sub(&rhs);
                        if !d.is_zero() {
                            return Err(Violation {
                                identity: "Leibniz rule".into(),
                                witness: poly_witness(&d, &names, &format!("frame pair ({},{})", l + 1, p + 1)),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn zero_c(m: usize, r: usize) -> Vec<Vec<Vec<MPoly>>> {
    vec![vec![vec![MPoly::zero(m); r]; r]; r]
}

/// An algebroid chart with its structure data lifted into a coefficient ring.
pub struct Chart<R> {
    pub alg: Arc<AlgebroidChart>,
    pub x: Vec<R>,
    pub a: Vec<Vec<R>>,
    pub c: Vec<Vec<Vec<R>>>,
    zero: R,
    ptabs: Mutex<HashMap<i64, Arc<LiftedP<R>>>>,
}

/// `P(e_b, e_c)` as sparse lists `(a, coefficient)` for jet labels `b, c`.
pub struct LiftedP<R> {
    pub k: i64,
    pub entries: Vec<Vec<Vec<(usize, R)>>>,
}

impl Chart<MPoly> {
    pub fn symbolic(alg: &AlgebroidChart) -> Self {
        Chart::new(Arc::new(alg.clone()), symbolic_coords(alg.m))
    }
}

impl Chart<Series<Q>> {
    /// Fields near `x0`, as Taylor series of the given order.
    pub fn at_point(alg: &Arc<AlgebroidChart>, x0: &[Q], order: i64) -> Self {
        Chart::new(alg.clone(), crate::coef::series_coords(x0, order))
    }
}

impl<R: Coef> Chart<R> {
    pub fn new(alg: Arc<AlgebroidChart>, x: Vec<R>) -> Self {
        assert_eq!(x.len(), alg.m);
        let a = alg.anchor.iter().map(|row| row.iter().map(|p| R::lift(p, &x)).collect()).collect();
        let c = alg
            .c
            .iter()
            .map(|cn| cn.iter().map(|row| row.iter().map(|p| R::lift(p, &x)).collect()).collect())
            .collect();
        let zero = x[0].zero_like();
        Chart { alg, x, a, c, zero, ptabs: Mutex::new(HashMap::new()) }
    }

    pub fn m(&self) -> usize {
        self.alg.m
    }

    pub fn r(&self) -> usize {
        self.alg.r
    }

    pub fn zero(&self) -> R {
        self.zero.clone()
    }

    pub fn one(&self) -> R {
        self.zero.one_like()
    }

    pub fn constant(&self, c: &Q) -> R {
        self.zero.from_q_like(c)
    }

    pub fn lift(&self, p: &MPoly) -> R {
        R::lift(p, &self.x)
    }

    /// `(t_*ξ)^i = Σ_l a^i_l ξ^l`.
    pub fn anchor_apply(&self, xi: &[R]) -> Vec<R> {
        (0..self.m())
            .map(|i| {
                let mut acc = self.zero();
                for l in 0..self.r() {
                    if !self.a[i][l].is_zero() && !xi[l].is_zero() {
                        acc = acc.add(&self.a[i][l].mul(&xi[l]));
                    }
                }
                acc
            })
            .collect()
    }

    /// `v(f) = Σ v^i ∂_i f`.
    pub fn vf_apply(&self, v: &[R], f: &R) -> R {
        let mut acc = self.zero();
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_zero() {
                acc = acc.add(&vi.mul(&f.deriv(i)));
            }
        }
        acc
    }

    /// Commutator of vector fields.
    pub fn vf_bracket(&self, v: &[R], w: &[R]) -> Vec<R> {
        (0..self.m()).map(|i| self.vf_apply(v, &w[i]).sub(&self.vf_apply(w, &v[i]))).collect()
    }

    /// `[ξ,η]^n = Σ ξ^l η^p c^n_{lp} + (t_*ξ)(η^n) − (t_*η)(ξ^n)`.
    pub fn bracket(&self, xi: &[R], eta: &[R]) -> Vec<R> {
        let r = self.r();
        let ax = self.anchor_apply(xi);
        let ae = self.anchor_apply(eta);
        (0..r)
            .map(|n| {
                let mut acc = self.vf_apply(&ax, &eta[n]).sub(&self.vf_apply(&ae, &xi[n]));
                for l in 0..r {
                    if xi[l].is_zero() {
                        continue;
                    }
                    for p in 0..r {
                        if !self.c[n][l][p].is_zero() && !eta[p].is_zero() {
                            acc = acc.add(&xi[l].mul(&eta[p]).mul(&self.c[n][l][p]));
                        }
                    }
                }
                acc
            })
            .collect()
    }

    /// `ι_*ξ = t_*ξ − ξ` split into its tangent and algebroid parts.
    pub fn iota_pushforward(&self, xi: &[R]) -> (Vec<R>, Vec<R>) {
        (self.anchor_apply(xi), xi.iter().map(|v| v.neg()).collect())
    }

    /// Lifted jet-bracket table of order `k`.
    pub fn ptab(&self, k: i64) -> Arc<LiftedP<R>> {
        let mut g = self.ptabs.lock().unwrap();
        if let Some(t) = g.get(&k) {
            return t.clone();
        }
        let sym = self.alg.ptable(k);
        let entries = sym
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.iter().map(|(a, p)| (*a, self.lift(p))).collect()).collect())
            .collect();
        let t = Arc::new(LiftedP { k, entries });
        g.insert(k, t.clone());
        t
    }
}

/// Number of jet coordinates `(α, l)` with `|α| ≤ k`.
pub fn jet_dim(m: usize, r: usize, k: i64) -> usize {
    multi::count_upto(m, k) * r
}
