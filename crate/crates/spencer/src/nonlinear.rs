//! Nonlinear Spencer operators on fields of jets of bisections.
//!
//! First complex: `i(v)𝒟σ = λ¹σ_{k+1}⁻¹·j¹σ_k·v − v` and the curvature
//! `𝒟₁u = Du − ½[u,u]`. Second complex: `𝒟̄σ`, stored by its `ν`-parts in
//! the frame `θ̃^i`, and `𝒟̄₁u = D̄u − ½[u,u]`. Then the pointwise images
//! `B^{k,1}`, `B̃^{k,1}` and the quotient complex over `δ̄`-images.

use crate::action::{eval_field, lift_jet, push_tangent, sigma_star};
use crate::algebroid::{jet_dim, AlgebroidChart};
use crate::brackets::{jet_pairing, CheckJet};
use crate::coef::Coef;
use crate::error::{Error, Result};
use crate::groupoid::{BisectionField, GroupoidModel, JetBisection};
use crate::jet::{combos, spencer_d_form, wedge_front, FormJet, JetSection, SymbolElement};
use crate::nijenhuis::sort_sign;
use crate::Chart;
use exact_core::ring::{lift_real, mat_inv, mat_vec};
use exact_core::{multi, q, qf, DiffRing, Dual, Local, MPoly, QMatrix, QuotientSpace, Ring, Q};

fn dual<R: Ring>(x: &[R], v: &[R]) -> Vec<Dual<R>> {
    x.iter().zip(v).map(|(a, b)| Dual::new(a.clone(), b.clone())).collect()
}

pub(crate) fn unit_vec<R: Ring>(like: &R, m: usize, i: usize) -> Vec<R> {
    (0..m).map(|j| if i == j { like.one_like() } else { like.zero_like() }).collect()
}

/// Vertical part of a curve of jets that passes through a unit.
fn vert_at_unit<R: Ring>(model: &GroupoidModel, c: &JetBisection<Dual<R>>) -> Result<JetSection<R>> {
    let id = JetBisection::identity(model, &c.x, c.k);
    let off = c.c.iter().zip(&id.c).any(|(a, b)| a.coeffs().iter().zip(b.coeffs()).any(|(x, y)| x.re != y.re));
    if off {
        return Err(Error::Compose("curve does not pass through a unit jet".into()));
    }
    Ok(c.vertical(model))
}

fn field_k(sigma: &BisectionField) -> Result<i64> {
    let k = sigma.order() - 1;
    if k < 0 {
        return Err(Error::Order("nonlinear operators need jets of order at least 1".into()));
    }
    Ok(k)
}

/// Jacobian of the point map `f` of a field at `x`.
pub fn point_jacobian<R: Local>(model: &GroupoidModel, sigma: &BisectionField, x: &[R], ps: &[R]) -> Result<Vec<Vec<R>>> {
    let m = model.m;
    let like = x[0].zero_like();
    let cols: Vec<Vec<R>> = (0..m).map(|i| push_tangent(model, sigma, x, ps, &unit_vec(&like, m, i))).collect::<Result<_>>()?;
    Ok((0..m).map(|r| (0..m).map(|c| cols[c][r].clone()).collect()).collect())
}

/// `i(v)𝒟σ` for a field of `(k+1)`-jets: the vertical part of
/// `σ_{k+1}(x)⁻¹·σ_k(x+εv)`, the inverse re-expanded along `f(x+εv)`.
pub fn cal_d_along<R: Local>(model: &GroupoidModel, sigma: &BisectionField, x: &[R], ps: &[R], v: &[R]) -> Result<JetSection<R>> {
    let k = field_k(sigma)?;
    let b = eval_field(model, sigma, x, ps)?.truncate(k + 1);
    let sv = eval_field(model, sigma, &dual(x, v), &lift_real(ps))?.truncate(k);
    let ys = sv.target(model);
    let binv = lift_jet(&b.invert(model)?).shift(&ys, k);
    vert_at_unit(model, &JetBisection::compose(model, &binv, &sv)?)
}

/// `𝒟σ` at `x` as a 1-form of order `k`.
pub fn cal_d<R: Local>(model: &GroupoidModel, sigma: &BisectionField, x: &[R], ps: &[R]) -> Result<FormJet<R>> {
    let k = field_k(sigma)?;
    let m = model.m;
    let like = x[0].zero_like();
    let comps = (0..m).map(|i| cal_d_along(model, sigma, x, ps, &unit_vec(&like, m, i))).collect::<Result<_>>()?;
    Ok(FormJet { m, r: model.n, p: 1, k, comps })
}

/// Matrix of `σ_*` on `T_x ⊕ J^k_x` in the basis `∂_i`, then jet coordinates.
pub fn sigma_star_matrix<R: Local>(model: &GroupoidModel, sigma: &BisectionField, x: &[R], ps: &[R], k: i64) -> Result<Vec<Vec<R>>> {
    let (m, r) = (model.m, model.n);
    let n = m + jet_dim(m, r, k);
    let like = x[0].zero_like();
    let mut cols = Vec::with_capacity(n);
    for c in 0..n {
        let e = unit_vec(&like, n, c);
        let u = CheckJet::new(e[..m].to_vec(), JetSection::from_vec(m, r, k, e[m..].to_vec()));
        let s = sigma_star(model, sigma, x, ps, &u)?;
        cols.push(s.v.into_iter().chain(s.xi.u).collect::<Vec<R>>());
    }
    Ok((0..n).map(|i| (0..n).map(|c| cols[c][i].clone()).collect()).collect())
}

/// `𝒟σ(v) = v − σ_*⁻¹(f_*v)` per coordinate direction, by inverting the
/// matrix of `σ_*`. The tangent parts vanish when `𝒟σ` is `s`-vertical.
pub fn cal_d_dual<R: Local>(model: &GroupoidModel, sigma: &BisectionField, x: &[R], ps: &[R]) -> Result<Vec<CheckJet<R>>> {
    let k = field_k(sigma)?;
    let (m, r) = (model.m, model.n);
    let s = sigma_star_matrix(model, sigma, x, ps, k)?;
    let sinv = mat_inv(&s).ok_or_else(|| Error::NotInvertible("σ_* is singular".into()))?;
    let like = x[0].zero_like();
    (0..m)
        .map(|i| {
            let e = unit_vec(&like, m, i);
            let mut fv = push_tangent(model, sigma, x, ps, &e)?;
            fv.resize(s.len(), like.clone());
            let w = mat_vec(&sinv, &fv);
            let v: Vec<R> = e.iter().zip(&w).map(|(a, b)| a.sub(b)).collect();
            let xi: Vec<R> = w[m..].iter().map(|c| c.neg()).collect();
            Ok(CheckJet::new(v, JetSection::from_vec(m, r, k, xi)))
        })
        .collect()
}

/// `[u, v]` of jet-valued forms `Σ dx^I⊗U_I`, `Σ dx^J⊗V_J` whose values
/// are paired pointwise: `Σ dx^I∧dx^J ⊗ pair(U_I, V_J)`.
pub fn form_bracket<R: Ring>(
    u: &FormJet<R>,
    v: &FormJet<R>,
    k_out: i64,
    like: &R,
    pair: impl Fn(&JetSection<R>, &JetSection<R>) -> JetSection<R>,
) -> FormJet<R> {
    let mut out = FormJet::zero(u.m, u.r, u.p + v.p, k_out, like);
    let tuples = combos(u.m, u.p + v.p);
    for (t1, a) in combos(u.m, u.p).iter().zip(&u.comps) {
        if a.is_zero() {
            continue;
        }
        for (t2, b) in combos(v.m, v.p).iter().zip(&v.comps) {
            if b.is_zero() {
                continue;
            }
            let seq: Vec<usize> = t1.iter().chain(t2).copied().collect();
            let Some((neg, t)) = sort_sign(&seq) else { continue };
            let val = pair(a, b).project(k_out);
            let idx = tuples.iter().position(|x| *x == t).unwrap();
            out.comps[idx] = if neg { out.comps[idx].sub(&val) } else { out.comps[idx].add(&val) };
        }
    }
    out
}

/// `𝒟₁u = Du − ½[u,u]` on `T*⊗J^k`, with the jet pairing on values.
pub fn cal_d1<R: Coef>(ch: &Chart<R>, u: &FormJet<R>) -> Result<FormJet<R>> {
    let du = spencer_d_form(u)?;
    let br = form_bracket(u, u, u.k - 1, &ch.zero(), |a, b| jet_pairing(ch, a, b));
    Ok(du.sub(&br.map(|c| c.scale_q(&qf(1, 2)))))
}

/// `i(v)𝒟̄σ` as a tilde element: `ν`-part `−vert(σ_k(x+εw)⁻¹·σ_{k+1}(x+εv))`
/// with `w = f_*⁻¹f_{B*}v`, tangent part `v − w`.
pub fn cal_dbar_along<R: Local>(model: &GroupoidModel, sigma: &BisectionField, x: &[R], ps: &[R], v: &[R]) -> Result<CheckJet<R>> {
    let k = field_k(sigma)?;
    let b = eval_field(model, sigma, x, ps)?.truncate(k + 1);
    let fbv = mat_vec(&b.target_jacobian(model), v);
    let fj = point_jacobian(model, sigma, x, ps)?;
    let finv = mat_inv(&fj).ok_or_else(|| Error::NotInvertible("point map has a singular jacobian".into()))?;
    let w = mat_vec(&finv, &fbv);
    let skw = eval_field(model, sigma, &dual(x, &w), &lift_real(ps))?.truncate(k).invert(model)?;
    let bs = lift_jet(&b).shift(&dual(x, v), k);
    let n = vert_at_unit(model, &JetBisection::compose(model, &skw, &bs)?)?.neg();
    let t = v.iter().zip(&w).map(|(a, c)| a.sub(c)).collect();
    Ok(CheckJet::new(t, n))
}

/// `t_*(i(v)𝒟̄σ)` compared with `v − f_*⁻¹(σ_{k+1}·v·σ_{k+1}⁻¹)`.
fn t_relation<R: Ring>(alg: &AlgebroidChart, x: &[R], e: &CheckJet<R>) -> bool {
    let like = x[0].zero_like();
    let val = e.xi.value();
    (0..alg.m).all(|i| {
        let mut acc = like.zero_like();
        for (l, vl) in val.iter().enumerate() {
            acc = acc.add(&alg.anchor[i][l].eval(x, &like).mul(vl));
        }
        acc == e.v[i]
    })
}

/// `𝒟̄σ` at `x` by its `ν`-parts: component `i` is `ν(i(∂_i)𝒟̄σ)`. Fails
/// if the tangent parts are not the anchor images of the `ν`-parts.
pub fn cal_dbar<R: Local>(model: &GroupoidModel, alg: &AlgebroidChart, sigma: &BisectionField, x: &[R], ps: &[R]) -> Result<FormJet<R>> {
    let k = field_k(sigma)?;
    let m = model.m;
    let like = x[0].zero_like();
    let mut comps = Vec::with_capacity(m);
    for i in 0..m {
        let e = cal_dbar_along(model, sigma, x, ps, &unit_vec(&like, m, i))?;
        if !t_relation(alg, x, &e) {
            return Err(Error::Shape("target part of 𝒟̄σ is not the anchor of its jet part".into()));
        }
        comps.push(e.xi);
    }
    Ok(FormJet { m, r: model.n, p: 1, k, comps })
}

/// `ν`-part of `u(w) = Σ ρ^l(w) U_l` for `u ∈ T̃*⊗J̃` by `ν`-parts, where
/// `ρ(w) = w_T − a(w₀)`.
fn apply_tilde<R: Coef>(ch: &Chart<R>, u: &FormJet<R>, w: &CheckJet<R>) -> JetSection<R> {
    let aw = ch.anchor_apply(&w.xi.value());
    let mut acc = JetSection::zero(u.m, u.r, u.k, &ch.zero());
    for (l, ul) in u.comps.iter().enumerate() {
        let c = w.v[l].sub(&aw[l]);
        if !c.is_zero() {
            acc = acc.add(&ul.scale(&c));
        }
    }
    acc
}

/// `[u, v]` of 1-forms in `T̃*⊗J̃` given by `ν`-parts, evaluated on coordinate
/// fields: `⟦U_i,V_j⟧ − ⟦U_j,V_i⟧ − v(⟦U_i,∂_j⟧ − ⟦U_j,∂_i⟧) − u(⟦∂_i,V_j⟧ − ⟦∂_j,V_i⟧)`.
/// Brackets use zero-padded lifts, so the result keeps the order `k`; the
/// pure first-complex bracket is its projection when `k` drops.
pub fn tilde_bracket<R: Coef>(ch: &Chart<R>, u: &FormJet<R>, v: &FormJet<R>) -> FormJet<R> {
    assert!(u.p == 1 && v.p == 1, "bracket of tilde 1-forms");
    let k = u.k.min(v.k);
    let (m, r) = (u.m, u.r);
    let z = ch.zero();
    let lift = |n: &JetSection<R>| crate::brackets::tilde_lift(ch, &n.project(k).lift_zero(k + 1, &z));
    let us: Vec<CheckJet<R>> = u.comps.iter().map(lift).collect();
    let vs: Vec<CheckJet<R>> = v.comps.iter().map(lift).collect();
    let d = |i: usize| CheckJet::tangent(unit_vec(&z, m, i), r, k + 1);
    let fb = |a: &CheckJet<R>, b: &CheckJet<R>| crate::brackets::first_bracket(ch, a, b);
    let mut out = FormJet::zero(m, r, 2, k, &z);
    for (idx, t) in combos(m, 2).iter().enumerate() {
        let (i, j) = (t[0], t[1]);
        let mut val = fb(&us[i], &vs[j]).xi.sub(&fb(&us[j], &vs[i]).xi);
        let w1 = fb(&us[i], &d(j)).sub(&fb(&us[j], &d(i)));
        let w2 = fb(&d(i), &vs[j]).sub(&fb(&d(j), &vs[i]));
        val = val.sub(&apply_tilde(ch, v, &w1).project(k)).sub(&apply_tilde(ch, u, &w2).project(k));
        out.comps[idx] = val;
    }
    out
}

/// `𝒟̄₁u = D̄u − ½[u,u]` on `ν`-parts.
pub fn cal_dbar1<R: Coef>(ch: &Chart<R>, u: &FormJet<R>) -> Result<FormJet<R>> {
    let du = spencer_d_form(u)?;
    let br = tilde_bracket(ch, u, u).project(u.k - 1);
    Ok(du.sub(&br.map(|c| c.scale_q(&qf(1, 2)))))
}

/// Residual of `σ_*(𝒟(σ'σ)(v) − 𝒟σ(v)) = 𝒟σ'(f_*v)` per direction.
pub fn compose_residual<R: Local>(model: &GroupoidModel, outer: &BisectionField, inner: &BisectionField, x: &[R]) -> Result<Vec<JetSection<R>>> {
    let comp = BisectionField::Compose(Box::new(outer.clone()), Box::new(inner.clone()));
    let y = eval_field(model, inner, x, &[])?.truncate(0).target(model);
    let like = x[0].zero_like();
    (0..model.m)
        .map(|i| {
            let e = unit_vec(&like, model.m, i);
            let diff = cal_d_along(model, &comp, x, &[], &e)?.sub(&cal_d_along(model, inner, x, &[], &e)?);
            let lhs = sigma_star(model, inner, x, &[], &CheckJet::jet(diff))?;
            let fv = push_tangent(model, inner, x, &[], &e)?;
            let rhs = cal_d_along(model, outer, &y, &[], &fv)?;
            if !lhs.v.iter().all(|c| c.is_zero()) {
                return Err(Error::Shape("σ_* moved a jet into the tangent part".into()));
            }
            Ok(lhs.xi.sub(&rhs))
        })
        .collect()
}

/// `ρ(u + ξ) = u − a(ξ₀)` at `y`.
fn rho<R: Ring>(alg: &AlgebroidChart, y: &[R], e: &CheckJet<R>) -> Vec<R> {
    let like = y[0].zero_like();
    let val = e.xi.value();
    (0..alg.m)
        .map(|i| {
            let mut acc = e.v[i].clone();
            for (l, vl) in val.iter().enumerate() {
                acc = acc.sub(&alg.anchor[i][l].eval(y, &like).mul(vl));
            }
            acc
        })
        .collect()
}

/// Residual of `σ_*(𝒟̄(σ'σ)(v) − 𝒟̄σ(v)) = 𝒟̄σ'(ρ(σ_*v))` per direction,
/// as tilde elements.
pub fn compose_bar_residual<R: Local>(
    model: &GroupoidModel,
    alg: &AlgebroidChart,
    outer: &BisectionField,
    inner: &BisectionField,
    x: &[R],
) -> Result<Vec<CheckJet<R>>> {
    let comp = BisectionField::Compose(Box::new(outer.clone()), Box::new(inner.clone()));
    let k = field_k(inner)?;
    let y = eval_field(model, inner, x, &[])?.truncate(0).target(model);
    let like = x[0].zero_like();
    (0..model.m)
        .map(|i| {
            let e = unit_vec(&like, model.m, i);
            let diff = cal_dbar_along(model, &comp, x, &[], &e)?.sub(&cal_dbar_along(model, inner, x, &[], &e)?);
            let lhs = sigma_star(model, inner, x, &[], &diff)?;
            let se = sigma_star(model, inner, x, &[], &CheckJet::tangent(e, model.n, k))?;
            let rhs = cal_dbar_along(model, outer, &y, &[], &rho(alg, &y, &se))?;
            Ok(lhs.sub(&rhs))
        })
        .collect()
}

/// Residual of `𝒟σ⁻¹(f_*v) = −σ_*(𝒟σ(v))` per direction, at `x0`.
pub fn inverse_residual(model: &GroupoidModel, sigma: &BisectionField, x0: &[Q]) -> Result<Vec<JetSection<Q>>> {
    let inv = BisectionField::Inverse { inner: Box::new(sigma.clone()), x0: x0.to_vec() };
    let y = eval_field(model, sigma, x0, &[])?.truncate(0).target(model);
    (0..model.m)
        .map(|i| {
            let e = unit_vec(&q(0), model.m, i);
            let fv = push_tangent(model, sigma, x0, &[], &e)?;
            let lhs = cal_d_along(model, &inv, &y, &[], &fv)?;
            let rhs = sigma_star(model, sigma, x0, &[], &CheckJet::jet(cal_d_along(model, sigma, x0, &[], &e)?))?;
            Ok(lhs.add(&rhs.xi))
        })
        .collect()
}

/// `σ_u = I_{k+1} + u·ξ` with `u` as the single parameter.
pub fn linear_family(model: &GroupoidModel, xi: &JetSection<MPoly>) -> BisectionField {
    let m = model.m;
    let mut s = BisectionField::identity(model, xi.k).with_params(1);
    let pv = MPoly::var(m + 1, m);
    let map: Vec<usize> = (0..m).collect();
    for a in multi::list_upto(m, xi.k) {
        for l in 0..model.n {
            let c = xi.get(&a, l);
            if !c.is_zero() {
                s.perturb(&a, l, &c.reindex(m + 1, &map).mul(&pv).scale(&multi::factorial(&a).recip()));
            }
        }
    }
    s
}

/// `d/du|₀ 𝒟σ_u` and `d/du|₀ 𝒟̄σ_u` at `x0` (the latter by `ν`-parts).
pub fn linearizations(model: &GroupoidModel, alg: &AlgebroidChart, xi: &JetSection<MPoly>, x0: &[Q]) -> Result<(FormJet<Q>, FormJet<Q>)> {
    let s = linear_family(model, xi);
    let x: Vec<Dual<Q>> = lift_real(x0);
    let ps = [Dual::new(q(0), q(1))];
    let eps = |f: FormJet<Dual<Q>>| FormJet {
        m: f.m,
        r: f.r,
        p: f.p,
        k: f.k,
        comps: f.comps.iter().map(|c| c.map_ring(|d| d.ep.clone())).collect(),
    };
    Ok((eps(cal_d(model, &s, &x, &ps)?), eps(cal_dbar(model, alg, &s, &x, &ps)?)))
}

fn anchor_q(alg: &AlgebroidChart, x0: &[Q]) -> Vec<Vec<Q>> {
    alg.anchor.iter().map(|row| row.iter().map(|p| p.eval_q(x0)).collect()).collect()
}

/// `v ↦ v + s·a(X(v)₀)` as an `m×m` matrix.
fn image_matrix(alg: &AlgebroidChart, x0: &[Q], x: &FormJet<Q>, s: i64) -> Vec<Vec<Q>> {
    let a = anchor_q(alg, x0);
    let m = alg.m;
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = q((i == j) as i64);
                    for (l, c) in x.comps[j].value().iter().enumerate() {
                        acc += &a[i][l] * c * q(s);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn check_one_form(alg: &AlgebroidChart, x: &FormJet<Q>) -> Result<()> {
    if x.p != 1 || x.m != alg.m || x.r != alg.r {
        return Err(Error::Shape(format!("expected a 1-form over m={}, r={}", alg.m, alg.r)));
    }
    Ok(())
}

/// Whether `X ∈ T*⊗J^k` at `x0` lies in `B^{k,1}`: `v ↦ t_*(X(v)+v)` invertible.
pub fn b_membership(alg: &AlgebroidChart, x0: &[Q], x: &FormJet<Q>) -> Result<bool> {
    check_one_form(alg, x)?;
    Ok(mat_inv(&image_matrix(alg, x0, x, 1)).is_some())
}

/// Whether `ν`-parts `X` at `x0` lie in `B̃^{k,1}`: `v ↦ v − a(νX(v)₀)` invertible.
pub fn btilde_membership(alg: &AlgebroidChart, x0: &[Q], x: &FormJet<Q>) -> Result<bool> {
    check_one_form(alg, x)?;
    Ok(mat_inv(&image_matrix(alg, x0, x, -1)).is_some())
}

/// Field of order `k+1` equal to `I_{k+1}` plus `Σ (x−x0)_i W_i`, `W_i` zero-padded.
fn affine_field(model: &GroupoidModel, x0: &[Q], w: &[JetSection<Q>]) -> BisectionField {
    let m = model.m;
    let k = w[0].k;
    let mut s = BisectionField::identity(model, k + 1);
    for a in multi::list_upto(m, k) {
        let f = multi::factorial(&a).recip();
        for l in 0..model.n {
            let mut p = MPoly::zero(m);
            for (i, wi) in w.iter().enumerate() {
                let c = wi.get(&a, l);
                if c != q(0) {
                    let h = MPoly::var(m, i).sub(&MPoly::constant(m, x0[i].clone()));
                    p = p.add(&h.scale(&(c * &f)));
                }
            }
            if !p.is_zero() {
                s.perturb(&a, l, &p);
            }
        }
    }
    s
}

/// A field `σ` with `σ(x0) = I_{k+1}(x0)` and `𝒟σ(x0) = X`.
pub fn b_solve(model: &GroupoidModel, alg: &AlgebroidChart, x0: &[Q], x: &FormJet<Q>) -> Result<BisectionField> {
    if !b_membership(alg, x0, x)? {
        return Err(Error::NotInvertible("v ↦ t_*(X(v)+v) is singular".into()));
    }
    Ok(affine_field(model, x0, &x.comps))
}

/// A field `σ` with `σ(x0) = I_{k+1}(x0)` and `𝒟̄σ(x0)` having `ν`-parts `X`.
pub fn btilde_solve(model: &GroupoidModel, alg: &AlgebroidChart, x0: &[Q], x: &FormJet<Q>) -> Result<BisectionField> {
    check_one_form(alg, x)?;
    // f_* = (1 − aX₀)⁻¹ and W(w) = X(f_*w)
    let fstar = mat_inv(&image_matrix(alg, x0, x, -1)).ok_or_else(|| Error::NotInvertible("v ↦ v − a(νX(v)₀) is singular".into()))?;
    let m = alg.m;
    let w: Vec<JetSection<Q>> = (0..m)
        .map(|i| {
            let mut acc = JetSection::zero(m, alg.r, x.k, &q(0));
            for j in 0..m {
                acc = acc.add(&x.comps[j].scale(&fstar[j][i]));
            }
            acc
        })
        .collect();
    Ok(affine_field(model, x0, &w))
}

/// `∂F ∈ γ^{k+1}` for a `(k+1)`-jet `F` whose `k`-jet is the unit:
/// `α!(c_α(F) − c_α(I))` at `|α| = k+1`.
pub fn partial_map(model: &GroupoidModel, f: &JetBisection<Q>) -> Result<SymbolElement> {
    let k1 = f.k;
    let id = JetBisection::identity(model, &f.x, k1);
    let m = f.x.len();
    let mut s = SymbolElement::zero(m, model.n, k1);
    for a in multi::list_upto(m, k1) {
        let top = multi::degree(&a) as i64 == k1;
        for l in 0..model.n {
            let d = f.c[l].coeff(&a) - id.c[l].coeff(&a);
            if top {
                let mut e = SymbolElement::unit(m, model.n, &a, l);
                e.s.iter_mut().for_each(|c| *c *= &d * multi::factorial(&a));
                s.s.iter_mut().zip(&e.s).for_each(|(x, y)| *x += y);
            } else if d != q(0) {
                return Err(Error::NotPartial(format!("coefficient {a:?} of component {l} differs from the unit")));
            }
        }
    }
    Ok(s)
}

/// `δ̄ = −D̄` on forms with values in `γ^{k+1}`, in `ν`-coordinates:
/// `Σ dx^i∧dx^I ⊗ λ_i w_I`. Only the top-order part of `w` is used.
pub fn delta_bar<R: Ring>(w: &FormJet<R>, like: &R) -> FormJet<R> {
    let k = w.k - 1;
    let mut out = FormJet::zero(w.m, w.r, w.p + 1, k, like);
    let upper = combos(w.m, w.p + 1);
    let lower = jet_dim(w.m, w.r, k);
    for (t, u) in w.tuples().iter().zip(&w.comps) {
        let mut top = u.clone();
        top.u[..lower].iter_mut().for_each(|c| *c = like.zero_like());
        for i in 0..w.m {
            let Some((s, tt)) = wedge_front(i, t) else { continue };
            let l = top.lambda(i);
            let idx = upper.iter().position(|x| *x == tt).unwrap();
            out.comps[idx] = if s < 0 { out.comps[idx].sub(&l) } else { out.comps[idx].add(&l) };
        }
    }
    out
}

/// `∧^pT̃*⊗J̃^k` modulo `δ̄(∧^{p−1}T̃*⊗γ^{k+1})` at a point, in `ν`-coordinates
/// (where `δ̄` has constant coefficients).
#[derive(Clone, Debug)]
pub struct SophQuotient {
    pub m: usize,
    pub r: usize,
    pub k: i64,
    pub p: usize,
    pub space: QuotientSpace,
    pub image_rank: usize,
}

pub fn flatten_form(w: &FormJet<Q>) -> Vec<Q> {
    w.comps.iter().flat_map(|c| c.u.iter().cloned()).collect()
}

impl SophQuotient {
    pub fn new(m: usize, r: usize, k: i64, p: usize) -> Result<Self> {
        if k < 0 {
            return Err(Error::Order("quotient needs k ≥ 0".into()));
        }
        let jd = jet_dim(m, r, k);
        let mut labels = Vec::new();
        for t in combos(m, p) {
            for a in multi::list_upto(m, k) {
                for l in 0..r {
                    labels.push(format!("{t:?};{a:?},{l}"));
                }
            }
        }
        let mut cols = Vec::new();
        if p > 0 {
            let top = jet_dim(m, r, k + 1);
            for t in combos(m, p - 1) {
                for c in jd..top {
                    let mut e = JetSection::zero(m, r, k + 1, &q(0));
                    e.u[c] = q(1);
                    let w = FormJet::single(m, &t, e);
                    cols.push(flatten_form(&delta_bar(&w, &q(0))));
                }
            }
        }
        let mat = QMatrix::from_cols(&cols, labels.len());
        let image_rank = mat.rank();
        let space = QuotientSpace::build(labels, &mat)?;
        Ok(SophQuotient { m, r, k, p, space, image_rank })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn class(&self, w: &FormJet<Q>) -> Vec<Q> {
        self.space.project(&flatten_form(&w.project(self.k)))
    }

    pub fn contains(&self, w: &FormJet<Q>) -> bool {
        self.space.contains(&flatten_form(&w.project(self.k)))
    }

    pub fn equal(&self, a: &FormJet<Q>, b: &FormJet<Q>) -> bool {
        self.class(a) == self.class(b)
    }
}

/// Representative of `D̂u`: `D̄` of the zero-padded lift.
pub fn dhat<R: DiffRing>(u: &FormJet<R>, like: &R) -> Result<FormJet<R>> {
    let lift = u.map(|c| c.lift_zero(u.k + 1, like));
    let mut d = spencer_d_form(&lift)?;
    d.k = u.k;
    Ok(d)
}

/// Representative of `𝒟̂₁u = D̂u − ½[u,u]`.
pub fn dhat1<R: Coef>(ch: &Chart<R>, u: &FormJet<R>) -> Result<FormJet<R>> {
    let du = dhat(u, &ch.zero())?;
    let br = tilde_bracket(ch, u, u);
    Ok(du.sub(&br.map(|c| c.scale_q(&qf(1, 2)))))
}

/// Extend a field of `k`-jets to order `k+1` with zero top coefficients.
pub fn lift_field(sigma: &BisectionField, m: usize) -> BisectionField {
    match sigma {
        BisectionField::Jets { k, np, coeffs } => {
            let mut coeffs = coeffs.clone();
            let ar = m + np;
            let n = coeffs.first().map(|c| c.len()).unwrap_or(0);
            coeffs.resize(multi::count_upto(m, k + 1), vec![MPoly::zero(ar); n]);
            BisectionField::Jets { k: k + 1, np: *np, coeffs }
        }
        _ => panic!("lift needs explicit jets"),
    }
}

/// Value at the base point of a form over series coefficients.
pub fn form_value(w: &FormJet<exact_core::Series<Q>>) -> FormJet<Q> {
    FormJet { m: w.m, r: w.r, p: w.p, k: w.k, comps: w.comps.iter().map(|c| c.map_ring(|s| s.value())).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::series_point;
    use crate::groupoid::Group;
    use crate::jet::spencer_d;
    use crate::random;
    use crate::AlgebroidChart;
    use std::sync::Arc;

    fn models() -> Vec<GroupoidModel> {
        vec![
            GroupoidModel::pair(1),
            GroupoidModel::group_bundle(1, Group::heisenberg()),
            GroupoidModel::gauge(1, Group::abelian(1)),
            GroupoidModel::unipotent_action(),
        ]
    }

    fn models2() -> Vec<GroupoidModel> {
        vec![
            GroupoidModel::pair(2),
            GroupoidModel::group_bundle(2, Group::heisenberg()),
            GroupoidModel::gauge(2, Group::abelian(1)),
            GroupoidModel::unipotent_action(),
        ]
    }

    fn eval_form(w: &FormJet<MPoly>, x0: &[Q]) -> FormJet<Q> {
        FormJet { m: w.m, r: w.r, p: w.p, k: w.k, comps: w.comps.iter().map(|c| c.map_ring(|p| p.eval_q(x0))).collect() }
    }

    #[test]
    fn pair_slope_example() {
        let model = GroupoidModel::pair(1);
        let x = MPoly::var(1, 0);
        let one = MPoly::one(1);
        let s = BisectionField::Jets { k: 1, np: 0, coeffs: vec![vec![x.clone()], vec![one.add(&x)]] };
        for (x0, want) in [(q(0), q(0)), (q(1), qf(-1, 2)), (q(2), qf(-2, 3)), (qf(-1, 2), q(1))] {
            let d = cal_d(&model, &s, &[x0], &[]).unwrap();
            assert_eq!(d.comps[0].u, vec![want]);
        }
    }

    #[test]
    fn holonomic_fields_are_flat() {
        for model in models() {
            let alg = model.extract_algebroid();
            let mut r = random::rng(3);
            let g: Vec<MPoly> =
                model.unit.iter().map(|u| u.add(&random::poly(&mut r, model.m, 2, 2).scale(&qf(1, 3)))).collect();
            let s = BisectionField::holonomic(&model, &g, 3);
            let x0 = vec![q(0); model.m];
            assert!(cal_d(&model, &s, &x0, &[]).unwrap().is_zero(), "{}", model.name);
            assert!(cal_dbar(&model, &alg, &s, &x0, &[]).unwrap().is_zero(), "{}", model.name);
        }
    }

    #[test]
    fn dual_route_and_corollaries() {
        for model in models().into_iter().chain(models2()) {
            let alg = model.extract_algebroid();
            let mut r = random::rng(11);
            for k in 0..3 {
                let s = random::bisection_field(&mut r, &model, k + 1);
                let x0 = random::point(&mut r, model.m);
                let d = cal_d(&model, &s, &x0, &[]).unwrap();
                let dd = cal_d_dual(&model, &s, &x0, &[]).unwrap();
                for i in 0..model.m {
                    assert!(dd[i].v.iter().all(|c| *c == q(0)), "{}", model.name);
                    assert_eq!(dd[i].xi, d.comps[i], "{} k={k}", model.name);
                }
                // σ_*(v) = σ.v.σ⁻¹ + σ_*(i(v)𝒟̄σ)
                let b = eval_field(&model, &s, &x0, &[]).unwrap();
                let jb = b.target_jacobian(&model);
                for i in 0..model.m {
                    let e = unit_vec(&q(0), model.m, i);
                    let lhs = sigma_star(&model, &s, &x0, &[], &CheckJet::tangent(e.clone(), model.n, k)).unwrap();
                    let ev = cal_dbar_along(&model, &s, &x0, &[], &e).unwrap();
                    let rhs = CheckJet::tangent(mat_vec(&jb, &e), model.n, k).add(&sigma_star(&model, &s, &x0, &[], &ev).unwrap());
                    assert_eq!(lhs, rhs, "{} k={k}", model.name);
                }
                assert!(cal_dbar(&model, &alg, &s, &x0, &[]).is_ok());
            }
        }
    }

    #[test]
    fn maurer_cartan_equations() {
        for model in models2() {
            let alg = Arc::new(model.extract_algebroid());
            let mut r = random::rng(23);
            for k in 1..3 {
                let s = random::bisection_field(&mut r, &model, k + 1);
                let x0 = random::point(&mut r, model.m);
                let xs = series_point(&x0, 3);
                let ch = Chart::at_point(&alg, &x0, 3);
                let u = cal_d(&model, &s, &xs, &[]).unwrap();
                assert!(!form_value(&u).is_zero());
                let c = cal_d1(&ch, &u).unwrap();
                assert!(form_value(&c).is_zero(), "{} k={k}: {:?}", model.name, form_value(&c));
                let ub = cal_dbar(&model, &alg, &s, &xs, &[]).unwrap();
                let cb = cal_dbar1(&ch, &ub).unwrap();
                assert!(form_value(&cb).is_zero(), "{} k={k}: {:?}", model.name, form_value(&cb));
                // negative controls
                let w = random::form(&mut r, model.m, model.n, 1, k, 2);
                let sym = Chart::symbolic(&alg);
                assert!(!cal_d1(&sym, &w).unwrap().is_zero());
                assert!(!cal_dbar1(&sym, &w).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn composition_inversion_linearization() {
        for model in models() {
            let alg = model.extract_algebroid();
            let mut r = random::rng(31);
            for k in 0..2 {
                let s1 = random::bisection_field(&mut r, &model, k + 1);
                let s2 = random::bisection_field(&mut r, &model, k + 1);
                let x0 = random::point(&mut r, model.m);
                for res in compose_residual(&model, &s2, &s1, &x0).unwrap() {
                    assert!(res.is_zero(), "{} k={k}", model.name);
                }
                for res in compose_bar_residual(&model, &alg, &s2, &s1, &x0).unwrap() {
                    assert!(res.is_zero(), "{} k={k}: {res:?}", model.name);
                }
                for res in inverse_residual(&model, &s1, &x0).unwrap() {
                    assert!(res.is_zero(), "{} k={k}", model.name);
                }
                let xi = random::jet(&mut r, model.m, model.n, k + 1, 2);
                let (l1, l2) = linearizations(&model, &alg, &xi, &x0).unwrap();
                let dxi = eval_form(&spencer_d(&xi).unwrap(), &x0);
                assert_eq!(l1, dxi, "{} k={k}", model.name);
                assert_eq!(l2, dxi, "{} k={k}", model.name);
            }
        }
    }

    #[test]
    fn brackets_match_the_nijenhuis_layer() {
        use crate::nijenhuis::{flatten, from_formjet, tilde_cochain, Frame, NijForm};
        let mut r = random::rng(41);
        for alg in [AlgebroidChart::tangent(2), AlgebroidChart::so3_bundle(2), GroupoidModel::unipotent_action().extract_algebroid()] {
            let alg = Arc::new(alg);
            let fr = Frame::new(Chart::symbolic(&alg), 2);
            let (m, n) = (alg.m, alg.r);
            let u = random::form(&mut r, m, n, 1, 2, 1);
            let v = random::form(&mut r, m, n, 1, 2, 1);
            let z = fr.zero();
            let tangent = |i: usize| flatten(&CheckJet::tangent(unit_vec(&z, m, i), n, 2));
            let ev = |w: &NijForm<MPoly>| w.eval(&[tangent(0), tangent(1)], &z);
            // second complex
            let nb = NijForm::bracket(&fr, &tilde_cochain(&fr, &u), &tilde_cochain(&fr, &v)).unwrap();
            let ours = tilde_bracket(&fr.ch, &u, &v).project(1);
            assert_eq!(ev(&nb).xi, ours.comps[0], "{}", alg.name);
            // first complex
            let nb = NijForm::bracket(&fr, &from_formjet(&fr, &u), &from_formjet(&fr, &v)).unwrap();
            let ours = form_bracket(&u, &v, 1, &z, |a, b| jet_pairing(&fr.ch, a, b));
            let e = ev(&nb);
            assert!(e.v.iter().all(|c| c.is_zero()));
            assert_eq!(e.xi, ours.comps[0], "{}", alg.name);
        }
    }

    #[test]
    fn images_and_solves() {
        for model in models().into_iter().chain(models2()) {
            let alg = model.extract_algebroid();
            let (m, n) = (model.m, model.n);
            let mut r = random::rng(53);
            for k in 0..2 {
                let x0 = random::point(&mut r, m);
                let zero = FormJet::zero(m, n, 1, k, &q(0));
                assert!(b_membership(&alg, &x0, &zero).unwrap());
                assert!(btilde_membership(&alg, &x0, &zero).unwrap());
                let s = random::bisection_field(&mut r, &model, k + 1);
                assert!(b_membership(&alg, &x0, &cal_d(&model, &s, &x0, &[]).unwrap()).unwrap());
                assert!(btilde_membership(&alg, &x0, &cal_dbar(&model, &alg, &s, &x0, &[]).unwrap()).unwrap());
                let mut hits = 0;
                for _ in 0..10 {
                    let x = FormJet { m, r: n, p: 1, k, comps: (0..m).map(|_| random::jet_q(&mut r, m, n, k)).collect() };
                    if b_membership(&alg, &x0, &x).unwrap() {
                        let s = b_solve(&model, &alg, &x0, &x).unwrap();
                        assert_eq!(cal_d(&model, &s, &x0, &[]).unwrap(), x, "{}", model.name);
                        hits += 1;
                    } else {
                        assert!(matches!(b_solve(&model, &alg, &x0, &x), Err(Error::NotInvertible(_))));
                    }
                    if btilde_membership(&alg, &x0, &x).unwrap() {
                        let s = btilde_solve(&model, &alg, &x0, &x).unwrap();
                        assert_eq!(cal_dbar(&model, &alg, &s, &x0, &[]).unwrap(), x, "{}", model.name);
                    } else {
                        assert!(matches!(btilde_solve(&model, &alg, &x0, &x), Err(Error::NotInvertible(_))));
                    }
                }
                assert!(hits > 0);
            }
        }
        // t_*X(v) = −v is not in the image
        let model = GroupoidModel::pair(1);
        let alg = model.extract_algebroid();
        let x = FormJet { m: 1, r: 1, p: 1, k: 0, comps: vec![JetSection::from_vec(1, 1, 0, vec![q(-1)])] };
        assert!(!b_membership(&alg, &[q(0)], &x).unwrap());
        assert!(btilde_membership(&alg, &[q(0)], &x).unwrap());
        assert!(!btilde_membership(&alg, &[q(0)], &x.neg()).unwrap());
    }

    #[test]
    fn partial_map_and_second_operator() {
        for model in models().into_iter().chain(models2()) {
            let alg = model.extract_algebroid();
            let mut r = random::rng(61);
            for k in 0..3 {
                let mut f = BisectionField::identity(&model, k + 1);
                for a in multi::list_exact(model.m, (k + 1) as u32) {
                    for j in 0..model.n {
                        f.perturb(&a, j, &random::poly(&mut r, model.m, 1, 2));
                    }
                }
                let x0 = random::point(&mut r, model.m);
                let fj = eval_field(&model, &f, &x0, &[]).unwrap();
                let d = partial_map(&model, &fj).unwrap();
                let w = FormJet { m: model.m, r: model.n, p: 0, k: k + 1, comps: vec![d.to_jet(&q(0))] };
                let want = delta_bar(&w, &q(0)).neg();
                assert_eq!(cal_dbar(&model, &alg, &f, &x0, &[]).unwrap(), want, "{} k={k}", model.name);
                let g = random::bisection_field(&mut r, &model, k + 1);
                let gj = eval_field(&model, &g, &x0, &[]).unwrap();
                if gj.truncate(k) != JetBisection::identity(&model, &x0, k) {
                    assert!(matches!(partial_map(&model, &gj), Err(Error::NotPartial(_))));
                }
            }
        }
    }

    #[test]
    fn quotient_complex() {
        let q1 = SophQuotient::new(1, 1, 1, 1).unwrap();
        assert_eq!((q1.space.ambient_dim(), q1.image_rank, q1.dim()), (2, 1, 1));
        assert_eq!(SophQuotient::new(2, 1, 1, 0).unwrap().dim(), 3);
        for model in models2() {
            let alg = Arc::new(model.extract_algebroid());
            let (m, n) = (model.m, model.n);
            let sym = Chart::symbolic(&alg);
            let z = MPoly::zero(m);
            let mut r = random::rng(71);
            for k in 1..3 {
                let x0 = random::point(&mut r, m);
                let q1 = SophQuotient::new(m, n, k, 1).unwrap();
                let q2 = SophQuotient::new(m, n, k, 2).unwrap();
                let u0 = random::jet(&mut r, m, n, k, 2);
                let w0 = FormJet { m, r: n, p: 0, k, comps: vec![u0.clone()] };
                // lift independence of D̂ and D̂² = 0
                let top = random::jet(&mut r, m, n, k + 1, 2);
                let mut other = u0.lift_zero(k + 1, &z);
                for c in crate::algebroid::jet_dim(m, n, k)..other.u.len() {
                    other.u[c] = top.u[c].clone();
                }
                let a = dhat(&w0, &z).unwrap();
                let mut b = spencer_d_form(&FormJet { m, r: n, p: 0, k: k + 1, comps: vec![other] }).unwrap();
                b.k = k;
                assert!(q1.equal(&eval_form(&a, &x0), &eval_form(&b, &x0)));
                assert!(q2.contains(&eval_form(&dhat(&a, &z).unwrap(), &x0)), "{} k={k}", model.name);
                // ideal property
                let u = random::form(&mut r, m, n, 1, k, 2);
                let s = random::jet(&mut r, m, n, k + 1, 2);
                let sw = FormJet { m, r: n, p: 0, k: k + 1, comps: vec![s] };
                let br = tilde_bracket(&sym, &u, &delta_bar(&sw, &z));
                assert!(q2.contains(&eval_form(&br, &x0)), "{} k={k}", model.name);
                // 𝒟̂: lift independence and curvature
                let f = random::bisection_field(&mut r, &model, k);
                let f1 = lift_field(&f, m);
                let mut f2 = f1.clone();
                for a in multi::list_exact(m, (k + 1) as u32) {
                    f2.perturb(&a, 0, &random::poly(&mut r, m, 1, 2));
                }
                let c1 = cal_dbar(&model, &alg, &f1, &x0, &[]).unwrap();
                let c2 = cal_dbar(&model, &alg, &f2, &x0, &[]).unwrap();
                assert!(q1.equal(&c1, &c2), "{} k={k}", model.name);
                let xs = series_point(&x0, 2);
                let ch = Chart::at_point(&alg, &x0, 2);
                let nser = cal_dbar(&model, &alg, &f1, &xs, &[]).unwrap();
                assert!(q2.contains(&form_value(&dhat1(&ch, &nser).unwrap())), "{} k={k}", model.name);
                assert!(!q2.contains(&eval_form(&dhat1(&sym, &u).unwrap(), &x0)) || m < 2);
                let g: Vec<MPoly> = model.unit.iter().map(|p| p.add(&random::poly(&mut r, m, 2, 1).scale(&qf(1, 4)))).collect();
                let hol = BisectionField::holonomic(&model, &g, k + 1);
                assert!(q1.contains(&cal_dbar(&model, &alg, &hol, &x0, &[]).unwrap()));
            }
        }
    }
}
