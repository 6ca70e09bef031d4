//! Actions of jets of bisections on tangent vectors of the groupoid and on
//! `T ⊕ J^k𝔤`, computed with `ε`-curves.

use crate::brackets::CheckJet;
use crate::error::{Error, Result};
use crate::groupoid::{series_eval, Arrow, BisectionField, GroupoidModel, JetBisection};
use crate::jet::JetSection;
use exact_core::ring::{eps_parts, lift_real, mat_vec};
use exact_core::{Dual, Local, Ring, Series};

pub(crate) fn lift_jet<R: Ring>(j: &JetBisection<R>) -> JetBisection<Dual<R>> {
    let like = Dual::real(j.like());
    JetBisection {
        k: j.k,
        x: lift_real(&j.x),
        c: j.c.iter().map(|s| s.map(&like, |c| Dual::real(c.clone()))).collect(),
    }
}

pub(crate) fn reals<R: Ring>(v: &[Dual<R>]) -> Vec<R> {
    v.iter().map(|d| d.re.clone()).collect()
}

/// `v ↦ F̃_*v` for `F̃(X) = F(t(X))·X`.
pub fn act_left<R: Ring>(model: &GroupoidModel, fj: &JetBisection<R>, x: &Arrow<Dual<R>>) -> Result<Arrow<Dual<R>>> {
    if fj.k < 1 {
        return Err(Error::Order("left action needs a jet of order at least 1".into()));
    }
    let t = model.target_at(&x.x, &x.g);
    if reals(&t) != fj.x {
        return Err(Error::Compose("jet does not sit at the target of the arrow".into()));
    }
    let f = lift_jet(fj);
    let d: Vec<Dual<R>> = t.iter().zip(&f.x).map(|(a, b)| a.sub(b)).collect();
    let fv: Vec<Dual<R>> = f.c.iter().map(|s| series_eval(s, &d)).collect();
    Ok(Arrow { x: x.x.clone(), g: model.mul_at(&x.x, &x.g, &fv) })
}

/// `v ↦ F̄_*v` for `F̄(X) = X·F(f⁻¹(s(X)))`.
pub fn act_right<R: Local>(model: &GroupoidModel, x: &Arrow<Dual<R>>, fj: &JetBisection<R>) -> Result<Arrow<Dual<R>>> {
    if fj.k < 1 {
        return Err(Error::Order("right action needs a jet of order at least 1".into()));
    }
    let y = fj.target(model);
    if reals(&x.x) != y {
        return Err(Error::Compose("jet target does not sit at the source of the arrow".into()));
    }
    let finv = lift_jet(&fj.invert(model)?);
    let d: Vec<Dual<R>> = x.x.iter().zip(&finv.x).map(|(a, b)| a.sub(b)).collect();
    let gi: Vec<Dual<R>> = finv.c.iter().map(|s| series_eval(s, &d)).collect();
    let xp = model.target_at(&x.x, &gi);
    let f = lift_jet(fj);
    let d2: Vec<Dual<R>> = xp.iter().zip(&f.x).map(|(a, b)| a.sub(b)).collect();
    let fv: Vec<Dual<R>> = f.c.iter().map(|s| series_eval(s, &d2)).collect();
    Ok(Arrow { x: xp.clone(), g: model.mul_at(&xp, &fv, &x.g) })
}

/// `σ(x_u)·σ(x_u)⁻¹` along `x_u = x + εv`: a unit at `f(x_u)`, whose
/// velocity is returned.
pub fn conj_tangent<R: Ring>(model: &GroupoidModel, sj: &JetBisection<R>, v: &[R]) -> Result<Vec<R>> {
    if sj.k < 1 {
        return Err(Error::Order("conjugation needs a jet of order at least 1".into()));
    }
    let xs: Vec<Dual<R>> = sj.x.iter().zip(v).map(|(a, b)| Dual::new(a.clone(), b.clone())).collect();
    let a = lift_jet(sj).shift(&xs, 0).arrow();
    let y = model.target_at(&a.x, &a.g);
    let ginv = model.inv_at(&a.x, &a.g);
    let prod = model.mul_at(&y, &ginv, &a.g);
    if prod != model.unit_at(&y) {
        return Err(Error::Compose("conjugate is not a unit".into()));
    }
    Ok(eps_parts(&y))
}

/// Tangent part `f_*v` of a field of jets at `x`.
pub fn push_tangent<R: Local>(model: &GroupoidModel, sigma: &BisectionField, x: &[R], ps: &[R], v: &[R]) -> Result<Vec<R>> {
    let xs: Vec<Dual<R>> = x.iter().zip(v).map(|(a, b)| Dual::new(a.clone(), b.clone())).collect();
    Ok(eps_parts(&field_target(model, sigma, &xs, &lift_real(ps))?))
}

pub fn params_of(sigma: &BisectionField) -> usize {
    match sigma {
        BisectionField::Jets { np, .. } => *np,
        BisectionField::Compose(a, _) => params_of(a),
        BisectionField::Inverse { inner, .. } => params_of(inner),
    }
}

/// Evaluation of a field; missing parameters are set to zero.
pub fn eval_field<R: Local>(model: &GroupoidModel, sigma: &BisectionField, x: &[R], ps: &[R]) -> Result<JetBisection<R>> {
    let mut ps = ps.to_vec();
    ps.resize(params_of(sigma), x[0].zero_like());
    sigma.eval(model, x, &ps)
}

/// `σ_*` on `T_x ⊕ J^k_x𝔤` for a field of `(k+1)`-jets, landing at `f(x)`:
/// the tangent part is `f_*v`, and the jet part is
/// `vert(σ_k(x+εv)·B⁻¹(f_B(x+εv)))` plus `vert(B(x+εa(ξ₀))·(I_k+εξ)·σ_k(x)⁻¹)`,
/// with `B = σ_{k+1}(x)` re-expanded along the curves.
pub fn sigma_star<R: Local>(model: &GroupoidModel, sigma: &BisectionField, x: &[R], ps: &[R], u: &CheckJet<R>) -> Result<CheckJet<R>> {
    let k = u.k();
    if sigma.order() < k + 1 {
        return Err(Error::Order(format!("action on order {k} needs jets of order {}", k + 1)));
    }
    let b = eval_field(model, sigma, x, ps)?.truncate(k + 1);
    let sk = b.truncate(k);
    let y = b.target(model);
    // tangent part, and the curve σ_k(x+εv)·B⁻¹(...)
    let xs: Vec<Dual<R>> = x.iter().zip(&u.v).map(|(a, c)| Dual::new(a.clone(), c.clone())).collect();
    let sv = eval_field(model, sigma, &xs, &lift_real(ps))?.truncate(k);
    let fv = eps_parts(&sv.target(model));
    let jb = b.target_jacobian(model);
    let fbv = mat_vec(&jb, &u.v);
    let ys: Vec<Dual<R>> = y.iter().zip(&fbv).map(|(a, c)| Dual::new(a.clone(), c.clone())).collect();
    let binv = lift_jet(&b.invert(model)?).shift(&ys, k);
    let c1 = JetBisection::compose(model, &sv, &binv)?;
    let mut jet = c1.vertical(model);
    // B(x+εa(ξ₀))·(I_k(x)+εξ)·σ_k(x)⁻¹
    if !u.xi.is_zero() {
        let bd = lift_jet(&b);
        jet = jet.add(&left_right(model, |t| Ok(bd.shift(t, k)), &sk, x, &u.xi)?);
    }
    Ok(CheckJet::new(fv, jet))
}

/// `vert(L(x+εa(ξ₀))·(I_k(x)+εξ)·σ_k(x)⁻¹)`, where `left` produces the
/// `k`-jet `L` at the moving target point.
fn left_right<R: Local>(
    model: &GroupoidModel,
    left: impl Fn(&[Dual<R>]) -> Result<JetBisection<Dual<R>>>,
    sk: &JetBisection<R>,
    x: &[R],
    xi: &JetSection<R>,
) -> Result<JetSection<R>> {
    let p = JetBisection::unit_plus(model, x, xi);
    let lt = left(&p.target(model))?;
    let lp = JetBisection::compose(model, &lt, &p)?;
    let sinv = lift_jet(&sk.invert(model)?);
    Ok(JetBisection::compose(model, &lp, &sinv)?.vertical(model))
}

/// `σ_*` on a tilde element with `ν`-part `ξ`, using only `σ_k`:
/// `f_*(a ξ₀) + vert(σ_k(x+εa(ξ₀))·(I_k+εξ)·σ_k(x)⁻¹)`.
pub fn sigma_star_tilde<R: Local>(model: &GroupoidModel, sigma: &BisectionField, x: &[R], ps: &[R], xi: &JetSection<R>) -> Result<CheckJet<R>> {
    let k = xi.k;
    if sigma.order() < k {
        return Err(Error::Order(format!("tilde action on order {k} needs jets of order {k}")));
    }
    let sk = eval_field(model, sigma, x, ps)?.truncate(k);
    let p = JetBisection::unit_plus(model, x, xi);
    let xh = eps_parts(&p.target(model));
    let psd = lift_real(ps);
    let jet = left_right(model, |t| Ok(eval_field(model, sigma, t, &psd)?.truncate(k)), &sk, x, xi)?;
    let fv = push_tangent(model, sigma, x, ps, &xh)?;
    Ok(CheckJet::new(fv, jet))
}

/// The target point of a field at `x`.
pub fn field_target<R: Local>(model: &GroupoidModel, sigma: &BisectionField, x: &[R], ps: &[R]) -> Result<Vec<R>> {
    Ok(eval_field(model, sigma, x, ps)?.truncate(0).target(model))
}

/// Points `x` over `Series` coordinates: `x0 + h`.
pub fn series_point<R: Ring>(x0: &[R], order: i64) -> Vec<Series<R>> {
    let shape = exact_core::Shape::new(x0.len(), order);
    x0.iter().enumerate().map(|(i, c)| Series::variable(&shape, c.clone(), i)).collect()
}
