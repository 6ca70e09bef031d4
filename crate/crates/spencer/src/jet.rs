//! Sections of `J^k𝔤` in jet coordinates `u_{α,l}`, the linear Spencer
//! operator, its extension to forms, and the symbol map δ.
//!
//! Coordinates are stored in the graded multi-index enumeration, position
//! `index(α)·r + l`. Because the enumeration is prefix-closed, projecting to
//! a lower order is truncation of the coordinate vector.

use crate::algebroid::jet_dim;
use crate::error::{Error, Result};
use exact_core::{multi, q, DiffRing, MPoly, Mi, QMatrix, Ring, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct JetSection<R> {
    pub m: usize,
    pub r: usize,
    pub k: i64,
    pub u: Vec<R>,
}

impl<R: Ring> JetSection<R> {
    pub fn zero(m: usize, r: usize, k: i64, like: &R) -> Self {
        JetSection { m, r, k, u: vec![like.zero_like(); jet_dim(m, r, k)] }
    }

    pub fn from_vec(m: usize, r: usize, k: i64, u: Vec<R>) -> Self {
        assert_eq!(u.len(), jet_dim(m, r, k), "jet coordinate count");
        JetSection { m, r, k, u }
    }

    pub fn pos(&self, a: &[u32], l: usize) -> usize {
        multi::index(a) * self.r + l
    }

    /// `u_{α,l}`, zero beyond the stored order.
    pub fn get(&self, a: &[u32], l: usize) -> R {
        let p = self.pos(a, l);
        if (multi::degree(a) as i64) <= self.k {
            self.u[p].clone()
        } else {
            self.u[0].zero_like()
        }
    }

    pub fn set(&mut self, a: &[u32], l: usize, v: R) {
        let p = self.pos(a, l);
        self.u[p] = v;
    }

    /// `π_{k'}`.
    pub fn project(&self, k: i64) -> Self {
        assert!(k <= self.k, "projection to a higher order");
        JetSection { m: self.m, r: self.r, k, u: self.u[..jet_dim(self.m, self.r, k)].to_vec() }
    }

    /// Lift to order `k'` with zero top coordinates.
    pub fn lift_zero(&self, k: i64, like: &R) -> Self {
        let mut u = self.u.clone();
        u.resize(jet_dim(self.m, self.r, k), like.zero_like());
        JetSection { m: self.m, r: self.r, k, u }
    }

    pub fn min_order(&self, o: &Self) -> i64 {
        self.k.min(o.k)
    }

    pub fn add(&self, o: &Self) -> Self {
        let k = self.min_order(o);
        let n = jet_dim(self.m, self.r, k);
        JetSection { m: self.m, r: self.r, k, u: (0..n).map(|i| self.u[i].add(&o.u[i])).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let k = self.min_order(o);
        let n = jet_dim(self.m, self.r, k);
        JetSection { m: self.m, r: self.r, k, u: (0..n).map(|i| self.u[i].sub(&o.u[i])).collect() }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }

    /// Fiberwise product `f·u` (the vector-bundle module structure).
    pub fn scale(&self, f: &R) -> Self {
        self.map(|x| if x.is_zero() { x.clone() } else { x.mul(f) })
    }

    pub fn scale_q(&self, c: &Q) -> Self {
        self.map(|x| x.scale(c))
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        JetSection { m: self.m, r: self.r, k: self.k, u: self.u.iter().map(f).collect() }
    }

    pub fn map_ring<S: Ring>(&self, f: impl Fn(&R) -> S) -> JetSection<S> {
        JetSection { m: self.m, r: self.r, k: self.k, u: self.u.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.u.iter().all(|x| x.is_zero())
    }

    /// `π₀`, the underlying algebroid section.
    pub fn value(&self) -> Vec<R> {
        self.u[..self.r].to_vec()
    }

    /// `(λ_i u)_α = u_{α+e_i}`; order drops by one.
    pub fn lambda(&self, i: usize) -> Self {
        let mis = multi::list_upto(self.m, self.k - 1);
        let mut u = Vec::with_capacity(mis.len() * self.r);
        for a in &mis {
            let b = multi::add(a, &multi::unit(self.m, i));
            for l in 0..self.r {
                u.push(self.u[self.pos(&b, l)].clone());
            }
        }
        JetSection { m: self.m, r: self.r, k: self.k - 1, u }
    }

    /// `λ_v = Σ v^i λ_i`.
    pub fn lambda_v(&self, v: &[R]) -> Self {
        let like = self.like();
        let mut acc = JetSection::zero(self.m, self.r, self.k - 1, &like);
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_zero() {
                acc = acc.add(&self.lambda(i).scale(vi));
            }
        }
        acc
    }

    pub fn like(&self) -> R {
        self.u.first().map(|x| x.zero_like()).expect("like of an empty jet")
    }
}

impl<R: DiffRing> JetSection<R> {
    pub fn deriv(&self, i: usize) -> Self {
        self.map(|x| x.deriv(i))
    }

    /// `u_{α,l} = ∂^α u_{0,l}` for every stored α.
    pub fn is_holonomic(&self) -> bool {
        for a in multi::list_upto(self.m, self.k) {
            for l in 0..self.r {
                let mut d = self.u[l].clone();
                for (i, &e) in a.iter().enumerate() {
                    for _ in 0..e {
                        d = d.deriv(i);
                    }
                }
                if d != self.get(&a, l) {
                    return false;
                }
            }
        }
        true
    }

    /// `i(∂_i)Du = ∂_i π_{k−1}u − λ_i u`.
    pub fn d_component(&self, i: usize) -> Self {
        self.project(self.k - 1).deriv(i).sub(&self.lambda(i))
    }

    /// `i(v)Du` for a vector field `v`.
    pub fn d_along(&self, v: &[R]) -> Self {
        let like = self.like();
        let mut acc = JetSection::zero(self.m, self.r, self.k - 1, &like);
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_zero() {
                acc = acc.add(&self.d_component(i).scale(vi));
            }
        }
        acc
    }
}

/// `j^kξ` with `u_{α,l} = ∂^α ξ^l`.
pub fn prolong<R: DiffRing>(xi: &[R], m: usize, k: i64) -> JetSection<R> {
    let r = xi.len();
    let mis = multi::list_upto(m, k);
    let mut u: Vec<R> = Vec::with_capacity(mis.len() * r);
    for a in &mis {
        for l in 0..r {
            // differentiate the parent entry once more
            let v = match a.iter().rposition(|&e| e > 0) {
                None => xi[l].clone(),
                Some(i) => {
                    let mut parent = a.clone();
                    parent[i] -= 1;
                    u[multi::index(&parent) * r + l].deriv(i)
                }
            };
            u.push(v);
        }
    }
    JetSection { m, r, k, u }
}

/// Jet product `(f·u)_α = Σ_{β≤α} C(α,β) ∂^{α−β}f u_β`: the jet of a product
/// of a function with the section `u` represents.
pub fn module_mult<R: DiffRing>(f: &R, u: &JetSection<R>) -> JetSection<R> {
    let mis = multi::list_upto(u.m, u.k);
    let mut out = JetSection::zero(u.m, u.r, u.k, &u.like());
    for a in &mis {
        for b in &mis {
            let Some(g) = multi::sub(a, b) else { continue };
            let mut df = f.clone();
            for (i, &e) in g.iter().enumerate() {
                for _ in 0..e {
                    df = df.deriv(i);
                }
            }
            if df.is_zero() {
                continue;
            }
            let c = multi::binom(a, b);
            for l in 0..u.r {
                let t = df.mul(&u.get(b, l)).scale(&c);
                let p = out.pos(a, l);
                out.u[p] = out.u[p].add(&t);
            }
        }
    }
    out
}

/// Strictly increasing `p`-tuples of `0..m`, in lexicographic order.
pub fn combos(m: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, p, &mut Vec::new(), &mut out);
    out
}

/// Sign and sorted tuple of `i ∧ I`; `None` if `i ∈ I`.
pub fn wedge_front(i: usize, tuple: &[usize]) -> Option<(i64, Vec<usize>)> {
    if tuple.contains(&i) {
        return None;
    }
    let before = tuple.iter().filter(|&&t| t < i).count();
    let mut t = tuple.to_vec();
    t.insert(before, i);
    Some((if before % 2 == 0 { 1 } else { -1 }, t))
}

/// `Σ_I dx^I ⊗ u_I` over increasing tuples `I`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormJet<R> {
    pub m: usize,
    pub r: usize,
    pub p: usize,
    pub k: i64,
    pub comps: Vec<JetSection<R>>,
}

impl<R: Ring> FormJet<R> {
    pub fn zero(m: usize, r: usize, p: usize, k: i64, like: &R) -> Self {
        let n = combos(m, p).len();
        FormJet { m, r, p, k, comps: vec![JetSection::zero(m, r, k, like); n] }
    }

    /// `dx^I ⊗ u`.
    pub fn single(m: usize, tuple: &[usize], u: JetSection<R>) -> Self {
        let like = u.like();
        let mut f = FormJet::zero(m, u.r, tuple.len(), u.k, &like);
        let idx = combos(m, tuple.len()).iter().position(|t| t == tuple).expect("increasing tuple");
        f.comps[idx] = u;
        f
    }

    pub fn tuples(&self) -> Vec<Vec<usize>> {
        combos(self.m, self.p)
    }

    pub fn component(&self, tuple: &[usize]) -> &JetSection<R> {
        let idx = self.tuples().iter().position(|t| t == tuple).expect("increasing tuple");
        &self.comps[idx]
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p);
        let comps: Vec<_> = self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect();
        FormJet { m: self.m, r: self.r, p: self.p, k: self.k.min(o.k), comps }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|u| u.neg())
    }

    pub fn map(&self, f: impl Fn(&JetSection<R>) -> JetSection<R>) -> Self {
        let comps: Vec<_> = self.comps.iter().map(f).collect();
        let k = comps.first().map(|c| c.k).unwrap_or(self.k);
        FormJet { m: self.m, r: self.r, p: self.p, k, comps }
    }

    pub fn project(&self, k: i64) -> Self {
        self.map(|u| u.project(k))
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    /// Contraction with `∂_i` in the first slot.
    pub fn contract(&self, i: usize) -> FormJet<R> {
        let like = self.comps[0].like();
        let mut out = FormJet::zero(self.m, self.r, self.p - 1, self.k, &like);
        let lower = combos(self.m, self.p - 1);
        for (t, u) in self.tuples().iter().zip(&self.comps) {
            if let Some(pos) = t.iter().position(|&x| x == i) {
                let mut rest = t.clone();
                rest.remove(pos);
                let idx = lower.iter().position(|x| *x == rest).unwrap();
                let s = if pos % 2 == 0 { u.clone() } else { u.neg() };
                out.comps[idx] = out.comps[idx].add(&s);
            }
        }
        out
    }

    /// `i(v)ω` for a vector field `v`.
    pub fn contract_v(&self, v: &[R]) -> FormJet<R> {
        let like = self.comps[0].like();
        let mut out = FormJet::zero(self.m, self.r, self.p - 1, self.k, &like);
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_zero() {
                out = out.add(&self.contract(i).map(|u| u.scale(vi)));
            }
        }
        out
    }
}

/// `Du` as a 1-form: component `i` is `∂_i π_{k−1}u − λ_i u`.
pub fn spencer_d<R: DiffRing>(u: &JetSection<R>) -> Result<FormJet<R>> {
    if u.k < 1 {
        return Err(Error::Order("D needs jet order at least 1".into()));
    }
    let comps = (0..u.m).map(|i| u.d_component(i)).collect();
    Ok(FormJet { m: u.m, r: u.r, p: 1, k: u.k - 1, comps })
}

/// `D(Σ dx^I⊗u_I) = Σ_{i,I} dx^i∧dx^I ⊗ (∂_i π − λ_i)u_I`.
pub fn spencer_d_form<R: DiffRing>(w: &FormJet<R>) -> Result<FormJet<R>> {
    if w.k < 1 {
        return Err(Error::Order("D needs jet order at least 1".into()));
    }
    let like = w.comps.first().map(|c| c.like());
    let Some(like) = like else {
        return Ok(FormJet { m: w.m, r: w.r, p: w.p + 1, k: w.k - 1, comps: vec![] });
    };
    let mut out = FormJet::zero(w.m, w.r, w.p + 1, w.k - 1, &like);
    let upper = combos(w.m, w.p + 1);
    for (t, u) in w.tuples().iter().zip(&w.comps) {
        for i in 0..w.m {
            let Some((s, tt)) = wedge_front(i, t) else { continue };
            let d = u.d_component(i);
            let idx = upper.iter().position(|x| *x == tt).unwrap();
            let d = if s < 0 { d.neg() } else { d };
            out.comps[idx] = out.comps[idx].add(&d);
        }
    }
    Ok(out)
}

/// An element of `γ^k ≅ S^kT*⊗𝔤` at a point: coordinates `s_{α,l}`, `|α| = k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolElement {
    pub m: usize,
    pub r: usize,
    pub k: i64,
    pub s: Vec<Q>,
}

impl SymbolElement {
    pub fn zero(m: usize, r: usize, k: i64) -> Self {
        SymbolElement { m, r, k, s: vec![q(0); symbol_dim(m, r, k)] }
    }

    /// Unit vector at `(α, l)`.
    pub fn unit(m: usize, r: usize, a: &[u32], l: usize) -> Self {
        let k = multi::degree(a) as i64;
        let mut e = SymbolElement::zero(m, r, k);
        e.s[symbol_pos(a, r, l)] = q(1);
        e
    }

    pub fn get(&self, a: &[u32], l: usize) -> Q {
        self.s[symbol_pos(a, self.r, l)].clone()
    }

    /// As a jet of order `k` whose only nonzero coordinates are on top.
    pub fn to_jet<R: Ring>(&self, like: &R) -> JetSection<R> {
        let mut j = JetSection::zero(self.m, self.r, self.k, like);
        for a in multi::list_exact(self.m, self.k as u32) {
            for l in 0..self.r {
                j.set(&a, l, like.from_q_like(&self.get(&a, l)));
            }
        }
        j
    }
}

pub fn symbol_dim(m: usize, r: usize, k: i64) -> usize {
    if k < 0 {
        0
    } else {
        multi::count_exact(m, k as u32) * r
    }
}

fn symbol_pos(a: &[u32], r: usize, l: usize) -> usize {
    let d = multi::degree(a);
    (multi::index(a) - multi::count_upto(a.len(), d as i64 - 1)) * r + l
}

/// `(δs)_{i;α,l} = −s_{α+e_i,l}`: component `i` of `δs`.
pub fn delta(s: &SymbolElement) -> Result<Vec<SymbolElement>> {
    if s.k < 1 {
        return Err(Error::Order("δ needs symbol order at least 1".into()));
    }
    Ok((0..s.m)
        .map(|i| {
            let mut out = SymbolElement::zero(s.m, s.r, s.k - 1);
            for a in multi::list_exact(s.m, (s.k - 1) as u32) {
                let b = multi::add(&a, &multi::unit(s.m, i));
                for l in 0..s.r {
                    out.s[symbol_pos(&a, s.r, l)] = -s.get(&b, l);
                }
            }
            out
        })
        .collect())
}

/// Labels `I;α,l` of the basis of `∧^pT*⊗γ^j`.
fn symbol_form_basis(m: usize, r: usize, p: usize, j: i64) -> Vec<(Vec<usize>, Mi, usize)> {
    let mut out = Vec::new();
    if j < 0 {
        return out;
    }
    for t in combos(m, p) {
        for a in multi::list_exact(m, j as u32) {
            for l in 0..r {
                out.push((t.clone(), a.clone(), l));
            }
        }
    }
    out
}

/// Matrix of `δ: ∧^pT*⊗γ^j → ∧^{p+1}T*⊗γ^{j−1}` in the standard bases.
pub fn delta_matrix(m: usize, r: usize, p: usize, j: i64) -> QMatrix {
    let src = symbol_form_basis(m, r, p, j);
    let dst = symbol_form_basis(m, r, p + 1, j - 1);
    let mut mat = QMatrix::zeros(dst.len(), src.len());
    for (c, (t, a, l)) in src.iter().enumerate() {
        for i in 0..m {
            let Some(b) = multi::sub(a, &multi::unit(m, i)) else { continue };
            let Some((s, tt)) = wedge_front(i, t) else { continue };
            let row = dst.iter().position(|(t2, a2, l2)| *t2 == tt && *a2 == b && l2 == l).unwrap();
            mat.set(row, c, q(-s));
        }
    }
    mat
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexRow {
    pub position: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub homology: usize,
}

/// Ranks of `0 → γ^k → T*⊗γ^{k−1} → … → ∧^mT*⊗γ^{k−m} → 0`.
pub fn delta_sequence_report(m: usize, r: usize, k: i64) -> Vec<ComplexRow> {
    let mut rows = Vec::new();
    let ranks: Vec<usize> = (0..=m).map(|p| delta_matrix(m, r, p, k - p as i64).rank()).collect();
    for p in 0..=m {
        let dim = combos(m, p).len() * symbol_dim(m, r, k - p as i64);
        let rank_in = if p == 0 { 0 } else { ranks[p - 1] };
        let rank_out = if p == m { 0 } else { ranks[p] };
        rows.push(ComplexRow { position: p, dim, rank_in, rank_out, homology: dim - rank_in - rank_out });
    }
    rows
}

/// One position of the degree-capped linear Spencer complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncRow {
    pub position: usize,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    /// Homology of the capped complex itself.
    pub homology: usize,
    /// Cocycles of coefficient degree ≤ d − k not hit from degree ≤ d.
    pub stable_homology: usize,
}

fn monomials_upto(m: usize, d: i64) -> Vec<Mi> {
    multi::list_upto(m, d)
}

/// Basis of `∧^pT*⊗J^j` with polynomial coefficients of degree ≤ d.
fn capped_basis(m: usize, r: usize, p: usize, j: i64, d: i64) -> Vec<(usize, usize, Mi)> {
    let nt = combos(m, p).len();
    let nj = jet_dim(m, r, j);
    let mons = monomials_upto(m, d);
    let mut out = Vec::new();
    for t in 0..nt {
        for c in 0..nj {
            for mu in &mons {
                out.push((t, c, mu.clone()));
            }
        }
    }
    out
}

fn capped_coords(w: &FormJet<MPoly>, basis: &[(usize, usize, Mi)]) -> Vec<Q> {
    basis.iter().map(|(t, c, mu)| w.comps[*t].u[*c].coeff(mu)).collect()
}

fn capped_element(m: usize, r: usize, p: usize, j: i64, b: &(usize, usize, Mi)) -> FormJet<MPoly> {
    let like = MPoly::zero(m);
    let mut w = FormJet::zero(m, r, p, j, &like);
    w.comps[b.0].u[b.1] = MPoly::monomial(m, b.2.clone(), q(1));
    w
}

/// Homology of `Θ → J^k → T*⊗J^{k−1} → … → ∧^mT*⊗J^{k−m}` with
/// polynomial coefficients of degree ≤ d. Position 0 is the section space
/// (mapped by `j^k`), position `p+1` is `∧^pT*⊗J^{k−p}`.
pub fn spencer_cohomology_truncated(m: usize, r: usize, k: i64, d: i64) -> Vec<TruncRow> {
    let like = MPoly::zero(m);
    let top = (m as i64).min(k);
    // differential matrices, index p: position p → p+1
    let mut spaces: Vec<Vec<(usize, usize, Mi)>> = Vec::new();
    spaces.push((0..r).flat_map(|l| monomials_upto(m, d).into_iter().map(move |mu| (0, l, mu))).collect());
    for p in 0..=top as usize {
        spaces.push(capped_basis(m, r, p, k - p as i64, d));
    }
    let mut mats: Vec<QMatrix> = Vec::new();
    // j^k
    {
        let dst = &spaces[1];
        let cols: Vec<Vec<Q>> = spaces[0]
            .iter()
            .map(|(_, l, mu)| {
                let mut xi = vec![like.clone(); r];
                xi[*l] = MPoly::monomial(m, mu.clone(), q(1));
                let j = prolong(&xi, m, k);
                capped_coords(&FormJet { m, r, p: 0, k, comps: vec![j] }, dst)
            })
            .collect();
        mats.push(QMatrix::from_cols(&cols, dst.len()));
    }
    for p in 0..top as usize {
        let j = k - p as i64;
        let dst = &spaces[p + 2];
        let cols: Vec<Vec<Q>> = spaces[p + 1]
            .iter()
            .map(|b| {
                let w = capped_element(m, r, p, j, b);
                capped_coords(&spencer_d_form(&w).expect("order ≥ 1"), dst)
            })
            .collect();
        mats.push(QMatrix::from_cols(&cols, dst.len()));
    }
    let n = spaces.len();
    let mut rows = Vec::new();
    for pos in 0..n {
        let dim = spaces[pos].len();
        let rank_in = if pos == 0 { 0 } else { mats[pos - 1].rank() };
        let rank_out = if pos + 1 < n { mats[pos].rank() } else { 0 };
        let homology = dim - rank_in - rank_out;
        // stable part: cocycles with coefficients of degree ≤ d − k
        let stable_homology = if pos == 0 {
            homology
        } else {
            let small: Vec<usize> = spaces[pos]
                .iter()
                .enumerate()
                .filter(|(_, b)| multi::degree(&b.2) as i64 <= d - k)
                .map(|(i, _)| i)
                .collect();
            let z_small = if pos + 1 < n {
                let sub = select_cols(&mats[pos], &small);
                sub.kernel_image()
                    .kernel
                    .iter()
                    .map(|v| {
                        let mut full = vec![q(0); dim];
                        for (c, &i) in small.iter().enumerate() {
                            full[i] = v[c].clone();
                        }
                        full
                    })
                    .collect::<Vec<_>>()
            } else {
                small
                    .iter()
                    .map(|&i| {
                        let mut e = vec![q(0); dim];
                        e[i] = q(1);
                        e
                    })
                    .collect()
            };
            let bnd = mats[pos - 1].kernel_image().image;
            let rb = rank_of(&bnd, dim);
            let mut both = bnd.clone();
            both.extend(z_small.iter().cloned());
            rank_of(&both, dim) - rb
        };
        rows.push(TruncRow { position: pos, dim, rank_in, rank_out, homology, stable_homology });
    }
    rows
}

fn select_cols(m: &QMatrix, cols: &[usize]) -> QMatrix {
    let data = m.data.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
    let mut out = QMatrix::from_rows(data);
    out.rows = m.rows;
    out.cols = cols.len();
    out
}

fn rank_of(vs: &[Vec<Q>], dim: usize) -> usize {
    if vs.is_empty() {
        return 0;
    }
    QMatrix::from_cols(vs, dim).rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn x(m: usize, i: usize) -> MPoly {
        MPoly::var(m, i)
    }

    #[test]
    fn prolong_examples() {
        let j = prolong(&[x(1, 0).mul(&x(1, 0))], 1, 1);
        assert_eq!(j.u, vec![x(1, 0).mul(&x(1, 0)), x(1, 0).scale(&q(2))]);
        let j = prolong(&[x(2, 0).mul(&x(2, 1))], 2, 2);
        assert_eq!(j.get(&[1, 1], 0), MPoly::one(2));
        assert!(j.get(&[2, 0], 0).is_zero());
        assert!(j.is_holonomic());
    }

    #[test]
    fn d_on_hand_example() {
        // u = (x², x): ∂x² − x = x
        let u = JetSection::from_vec(1, 1, 1, vec![x(1, 0).mul(&x(1, 0)), x(1, 0)]);
        let d = spencer_d(&u).unwrap();
        assert_eq!(d.comps[0].u, vec![x(1, 0)]);
        assert!(spencer_d(&u.project(0)).is_err());
    }

    #[test]
    fn d_kills_prolongations_and_squares_to_zero() {
        let mut rng = random::rng(11);
        for m in 1..=2 {
            for r in 1..=2 {
                for k in 1..=3 {
                    let xi = random::section(&mut rng, m, r, 4);
                    assert!(spencer_d(&prolong(&xi, m, k)).unwrap().is_zero());
                    if k >= 2 {
                        let u = random::jet(&mut rng, m, r, k, 3);
                        let du = spencer_d(&u).unwrap();
                        assert!(!du.is_zero());
                        assert!(spencer_d_form(&du).unwrap().is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn leibniz_with_pointwise_product() {
        let mut rng = random::rng(12);
        let (m, r, k) = (2, 2, 2);
        for _ in 0..10 {
            let u = random::jet(&mut rng, m, r, k, 2);
            let f = random::poly(&mut rng, m, 2, 3);
            let lhs = spencer_d(&u.scale(&f)).unwrap();
            let du = spencer_d(&u).unwrap();
            for i in 0..m {
                let want = u.project(k - 1).scale(&f.deriv(i)).add(&du.comps[i].scale(&f));
                assert_eq!(lhs.comps[i], want);
            }
        }
    }

    #[test]
    fn module_mult_is_jet_of_product() {
        let u = JetSection::from_vec(1, 1, 1, vec![MPoly::var(1, 0).scale(&q(3)), MPoly::one(1)]);
        let p = module_mult(&x(1, 0), &u);
        assert_eq!(p.u, vec![x(1, 0).mul(&u.u[0]), x(1, 0).mul(&u.u[1]).add(&u.u[0])]);
        let mut rng = random::rng(13);
        let xi = random::section(&mut rng, 2, 2, 3);
        let f = random::poly(&mut rng, 2, 2, 3);
        let fxi: Vec<MPoly> = xi.iter().map(|c| c.mul(&f)).collect();
        assert_eq!(module_mult(&f, &prolong(&xi, 2, 3)), prolong(&fxi, 2, 3));
    }

    #[test]
    fn d_of_dx_wedge() {
        // D(dx¹⊗u) = −dx¹∧Du
        let mut rng = random::rng(14);
        let u = random::jet(&mut rng, 2, 1, 2, 2);
        let w = FormJet::single(2, &[0], u.clone());
        let lhs = spencer_d_form(&w).unwrap();
        let du = spencer_d(&u).unwrap();
        assert_eq!(lhs.comps[0], du.comps[1].neg());
    }

    #[test]
    fn symmetry_display() {
        // i(v)D(i(w)Du) − i(w)D(i(v)Du) − i([v,w])Dπu = 0
        let mut rng = random::rng(15);
        let m = 2;
        for _ in 0..5 {
            let u = random::jet(&mut rng, m, 1, 3, 2);
            let v = random::section(&mut rng, m, m, 2);
            let w = random::section(&mut rng, m, m, 2);
            let br: Vec<MPoly> = (0..m)
                .map(|i| {
                    let a: MPoly = (0..m).fold(MPoly::zero(m), |acc, j| acc.add(&v[j].mul(&w[i].deriv(j))));
                    let b: MPoly = (0..m).fold(MPoly::zero(m), |acc, j| acc.add(&w[j].mul(&v[i].deriv(j))));
                    a.sub(&b)
                })
                .collect();
            let lhs = u.d_along(&w).d_along(&v).sub(&u.d_along(&v).d_along(&w));
            let rhs = u.project(2).d_along(&br);
            assert_eq!(lhs.sub(&rhs), JetSection::zero(m, 1, 1, &MPoly::zero(m)));
        }
    }

    #[test]
    fn delta_examples() {
        let s = SymbolElement::unit(2, 1, &[1, 1], 0);
        let d = delta(&s).unwrap();
        let neg = |e: SymbolElement| SymbolElement { s: e.s.iter().map(|c| -c).collect(), ..e };
        assert_eq!(d[0], neg(SymbolElement::unit(2, 1, &[0, 1], 0)));
        assert_eq!(d[1], neg(SymbolElement::unit(2, 1, &[1, 0], 0)));
        assert!(delta(&SymbolElement::zero(2, 1, 0)).is_err());
    }

    #[test]
    fn delta_is_d_on_constant_top_order() {
        let mut rng = random::rng(16);
        let (m, r, k) = (2, 2, 3);
        let mut s = SymbolElement::zero(m, r, k);
        for c in s.s.iter_mut() {
            *c = random::small_q(&mut rng);
        }
        let du = spencer_d(&s.to_jet(&MPoly::zero(m))).unwrap();
        for (i, di) in delta(&s).unwrap().iter().enumerate() {
            assert_eq!(du.comps[i], di.to_jet(&MPoly::zero(m)));
        }
    }

    #[test]
    fn delta_sequence_dims() {
        let rows = delta_sequence_report(2, 1, 2);
        let dims: Vec<usize> = rows.iter().map(|r| r.dim).collect();
        assert_eq!(dims, vec![3, 4, 1]);
        assert!(rows.iter().all(|r| r.homology == 0));
        assert_eq!(symbol_dim(2, 2, 3), 8);
        let m1 = delta_sequence_report(1, 2, 3);
        assert_eq!(m1.iter().map(|r| r.dim).collect::<Vec<_>>(), vec![2, 2]);
        assert!(m1.iter().all(|r| r.homology == 0));
    }

    #[test]
    fn truncated_complex_m1() {
        let rows = spencer_cohomology_truncated(1, 1, 2, 4);
        // positions: sections, J², T*⊗J¹
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[1].stable_homology, 0);
        assert_eq!(rows[2].stable_homology, 0);
    }
}
