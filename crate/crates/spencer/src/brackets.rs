//! Elements of `T ⊕ J^k𝔤` and the three brackets on them.
//!
//! The first bracket is `⟦v+ξ, w+η⟧ = [v,w] + i(v)Dη − i(w)Dξ + P_k(ξ,η)`,
//! with `P_k` the function-bilinear jet-jet table; it drops one order.
//! The second bracket on `J^k𝔤` keeps the order by evaluating the first
//! bracket on tilde lifts one order up. The third bracket pairs a tilde
//! element of order `k+1` with a check element of order `k`.

use crate::algebroid::Chart;
use crate::coef::Coef;
use crate::jet::{prolong, JetSection};
use exact_core::Ring;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckJet<R> {
    /// Tangent part, one entry per chart direction.
    pub v: Vec<R>,
    pub xi: JetSection<R>,
}

impl<R: Ring> CheckJet<R> {
    pub fn new(v: Vec<R>, xi: JetSection<R>) -> Self {
        assert_eq!(v.len(), xi.m);
        CheckJet { v, xi }
    }

    pub fn tangent(v: Vec<R>, r: usize, k: i64) -> Self {
        let like = v[0].zero_like();
        let m = v.len();
        CheckJet { v, xi: JetSection::zero(m, r, k, &like) }
    }

    pub fn jet(xi: JetSection<R>) -> Self {
        let like = xi.like();
        CheckJet { v: vec![like; xi.m], xi }
    }

    pub fn k(&self) -> i64 {
        self.xi.k
    }

    pub fn add(&self, o: &Self) -> Self {
        CheckJet { v: self.v.iter().zip(&o.v).map(|(a, b)| a.add(b)).collect(), xi: self.xi.add(&o.xi) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        CheckJet { v: self.v.iter().map(|a| a.neg()).collect(), xi: self.xi.neg() }
    }

    /// Pointwise multiplication by a function.
    pub fn scale(&self, f: &R) -> Self {
        CheckJet { v: self.v.iter().map(|a| a.mul(f)).collect(), xi: self.xi.scale(f) }
    }

    pub fn project(&self, k: i64) -> Self {
        CheckJet { v: self.v.clone(), xi: self.xi.project(k) }
    }

    /// Zero-padded lift of the jet part.
    pub fn lift_zero(&self, k: i64) -> Self {
        let like = self.xi.like();
        CheckJet { v: self.v.clone(), xi: self.xi.lift_zero(k, &like) }
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|a| a.is_zero()) && self.xi.is_zero()
    }

    /// `ν`: the jet part.
    pub fn nu(&self) -> JetSection<R> {
        self.xi.clone()
    }
}

/// `P_k(ξ, η)`, the pointwise part of the jet-jet first bracket; order `k−1`.
pub fn jet_pairing<R: Coef>(ch: &Chart<R>, xi: &JetSection<R>, eta: &JetSection<R>) -> JetSection<R> {
    let k = xi.k.min(eta.k);
    let (m, r) = (ch.m(), ch.r());
    let mut out = JetSection::zero(m, r, k - 1, &ch.zero());
    if k < 1 {
        return out;
    }
    let tab = ch.ptab(k);
    let n = out.u.len();
    for (b, row) in tab.entries.iter().enumerate() {
        let xb = &xi.u[b];
        if xb.is_zero() {
            continue;
        }
        for (c, ent) in row.iter().enumerate() {
            let ec = &eta.u[c];
            if ec.is_zero() || ent.is_empty() {
                continue;
            }
            let w = xb.mul(ec);
            for (a, coef) in ent {
                debug_assert!(*a < n);
                out.u[*a] = out.u[*a].add(&w.mul(coef));
            }
        }
    }
    out
}

/// `⟦v+ξ, w+η⟧_k`, of order `k−1`.
pub fn first_bracket<R: Coef>(ch: &Chart<R>, a: &CheckJet<R>, b: &CheckJet<R>) -> CheckJet<R> {
    let k = a.k().min(b.k());
    let (xi, eta) = (a.xi.project(k), b.xi.project(k));
    let v = ch.vf_bracket(&a.v, &b.v);
    if k < 1 {
        // the jet part lives in the zero space J^{-1}
        return CheckJet { v, xi: JetSection::zero(ch.m(), ch.r(), k - 1, &ch.zero()) };
    }
    let j = eta.d_along(&a.v).sub(&xi.d_along(&b.v)).add(&jet_pairing(ch, &xi, &eta));
    CheckJet { v, xi: j }
}

/// `ξ̃ = ξ_H + ξ` with `ξ_H = a(π₀ξ)`.
pub fn tilde_lift<R: Coef>(ch: &Chart<R>, xi: &JetSection<R>) -> CheckJet<R> {
    CheckJet { v: ch.anchor_apply(&xi.value()), xi: xi.clone() }
}

/// Whether the tangent part is the anchor image of the jet's value.
pub fn is_tilde<R: Coef>(ch: &Chart<R>, a: &CheckJet<R>) -> bool {
    ch.anchor_apply(&a.xi.value()) == a.v
}

/// `⟦ξ, η⟧_k = i(ξ_H)Dη_{k+1} − i(η_H)Dξ_{k+1} + P_{k+1}(ξ_{k+1}, η_{k+1})`
/// for the given lifts; the result does not depend on them.
pub fn zerobra_lifted<R: Coef>(ch: &Chart<R>, xi1: &JetSection<R>, eta1: &JetSection<R>) -> JetSection<R> {
    first_bracket(ch, &tilde_lift(ch, xi1), &tilde_lift(ch, eta1)).xi
}

/// The order-preserving bracket on `J^k𝔤`, with zero-padded lifts.
pub fn zerobra<R: Coef>(ch: &Chart<R>, xi: &JetSection<R>, eta: &JetSection<R>) -> JetSection<R> {
    let k = xi.k.min(eta.k);
    let z = ch.zero();
    zerobra_lifted(ch, &xi.project(k).lift_zero(k + 1, &z), &eta.project(k).lift_zero(k + 1, &z))
}

/// Second bracket on tilde elements: `tilde_lift(⟦ν ξ̃, ν η̃⟧)`.
pub fn second_bracket<R: Coef>(ch: &Chart<R>, a: &CheckJet<R>, b: &CheckJet<R>) -> CheckJet<R> {
    tilde_lift(ch, &zerobra(ch, &a.xi, &b.xi))
}

/// `⟦ξ̃_{k+1}, η̌_k⟧_k`: the first bracket with a lift of `η̌`.
pub fn third_bracket<R: Coef>(ch: &Chart<R>, xt: &CheckJet<R>, eta: &CheckJet<R>) -> CheckJet<R> {
    third_bracket_lifted(ch, xt, &eta.lift_zero(eta.k() + 1))
}

/// Third bracket with an explicit lift `η̌_{k+1}`.
pub fn third_bracket_lifted<R: Coef>(ch: &Chart<R>, xt: &CheckJet<R>, eta1: &CheckJet<R>) -> CheckJet<R> {
    first_bracket(ch, &xt.project(eta1.k()), eta1)
}

/// `j^k` of an algebroid section as a check element with zero tangent part.
pub fn prolong_check<R: Coef>(ch: &Chart<R>, theta: &[R], k: i64) -> CheckJet<R> {
    CheckJet::jet(prolong(theta, ch.m(), k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebroid::AlgebroidChart;
    use crate::random;
    use exact_core::{q, MPoly};
    use std::sync::Arc;

    fn pair1() -> Chart<MPoly> {
        Chart::symbolic(&AlgebroidChart::tangent(1))
    }

    #[test]
    fn pair_holonomic_example() {
        // ⟦j¹(x∂ₓ), j¹(∂ₓ)⟧₁ = j⁰[x∂ₓ, ∂ₓ] = j⁰(−∂ₓ)
        let ch = pair1();
        let x = MPoly::var(1, 0);
        let a = prolong_check(&ch, &[x.clone()], 1);
        let b = prolong_check(&ch, &[MPoly::one(1)], 1);
        let br = first_bracket(&ch, &a, &b);
        assert_eq!(br.xi.u, vec![MPoly::constant(1, q(-1))]);
        assert!(br.v[0].is_zero());
        let t = tilde_lift(&ch, &a.xi);
        assert_eq!(t.v, vec![x]);
    }

    #[test]
    fn pairing_matches_holonomic_oracle() {
        let mut rng = random::rng(21);
        let algs = [
            AlgebroidChart::tangent(2),
            AlgebroidChart::so3_bundle(1),
        ];
        for alg in algs {
            let ch = Chart::new(Arc::new(alg.clone()), crate::coef::symbolic_coords(alg.m));
            for k in 1..=3 {
                let th = random::section(&mut rng, alg.m, alg.r, 3);
                let mu = random::section(&mut rng, alg.m, alg.r, 3);
                let lhs = jet_pairing(&ch, &prolong(&th, alg.m, k), &prolong(&mu, alg.m, k));
                assert_eq!(lhs, prolong(&ch.bracket(&th, &mu), alg.m, k - 1));
            }
        }
    }

    fn sl2_line() -> AlgebroidChart {
        AlgebroidChart::sl2_line()
    }

    fn charts() -> Vec<Chart<MPoly>> {
        let a = sl2_line();
        assert_eq!(a.validate(), Ok(()));
        vec![Chart::symbolic(&a), Chart::symbolic(&AlgebroidChart::tangent(2))]
    }

    fn rand_check(rng: &mut random::Rand, ch: &Chart<MPoly>, k: i64) -> CheckJet<MPoly> {
        let (m, r) = (ch.m(), ch.r());
        CheckJet::new(random::section(rng, m, m, 2), random::jet(rng, m, r, k, 2))
    }

    #[test]
    fn sl2_pairing_holonomic() {
        let ch = Chart::symbolic(&sl2_line());
        let mut rng = random::rng(22);
        for k in 1..=3 {
            let th = random::section(&mut rng, 1, 3, 3);
            let mu = random::section(&mut rng, 1, 3, 3);
            let lhs = jet_pairing(&ch, &prolong(&th, 1, k), &prolong(&mu, 1, k));
            assert_eq!(lhs, prolong(&ch.bracket(&th, &mu), 1, k - 1));
        }
    }

    #[test]
    fn leibniz_and_jacobi() {
        let mut rng = random::rng(23);
        for ch in charts() {
            let m = ch.m();
            for _ in 0..4 {
                let k = 3;
                let (a, b, c) = (rand_check(&mut rng, &ch, k), rand_check(&mut rng, &ch, k), rand_check(&mut rng, &ch, k));
                let f = random::poly(&mut rng, m, 2, 3);
                let lhs = first_bracket(&ch, &a, &b.scale(&f));
                let vf = ch.vf_apply(&a.v, &f);
                let rhs = b.project(k - 1).scale(&vf).add(&first_bracket(&ch, &a, &b).scale(&f));
                assert_eq!(lhs, rhs);
                let j = |x: &CheckJet<MPoly>, y: &CheckJet<MPoly>, z: &CheckJet<MPoly>| {
                    first_bracket(&ch, &first_bracket(&ch, x, y), &z.project(k - 1))
                };
                let s = j(&a, &b, &c).add(&j(&b, &c, &a)).add(&j(&c, &a, &b));
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn order_zero_pairing_vanishes() {
        let ch = Chart::symbolic(&sl2_line());
        let mut rng = random::rng(24);
        let a = CheckJet::jet(random::jet(&mut rng, 1, 3, 0, 2));
        let b = CheckJet::jet(random::jet(&mut rng, 1, 3, 0, 2));
        let br = first_bracket(&ch, &a, &b);
        assert_eq!(br.k(), -1);
        assert!(br.is_zero());
    }

    #[test]
    fn zerobra_properties() {
        let mut rng = random::rng(25);
        for ch in charts() {
            let (m, r) = (ch.m(), ch.r());
            for k in 0..=2 {
                let th = random::section(&mut rng, m, r, 3);
                let mu = random::section(&mut rng, m, r, 3);
                let z = zerobra(&ch, &prolong(&th, m, k), &prolong(&mu, m, k));
                assert_eq!(z, prolong(&ch.bracket(&th, &mu), m, k));
                let xi = random::jet(&mut rng, m, r, k, 2);
                let eta = random::jet(&mut rng, m, r, k, 2);
                let f = random::poly(&mut rng, m, 2, 3);
                let lhs = zerobra(&ch, &xi, &eta.scale(&f));
                let hf = ch.vf_apply(&ch.anchor_apply(&xi.value()), &f);
                assert_eq!(lhs, zerobra(&ch, &xi, &eta).scale(&f).add(&eta.scale(&hf)));
                // lift independence
                let xi1 = random::jet(&mut rng, m, r, k + 1, 2);
                let eta1 = random::jet(&mut rng, m, r, k + 1, 2);
                let mut xi1b = xi1.clone();
                let mut eta1b = eta1.clone();
                let top = crate::algebroid::jet_dim(m, r, k);
                for i in top..xi1b.u.len() {
                    xi1b.u[i] = xi1b.u[i].add(&random::poly(&mut rng, m, 2, 2));
                    eta1b.u[i] = eta1b.u[i].sub(&random::poly(&mut rng, m, 2, 2));
                }
                assert_eq!(zerobra_lifted(&ch, &xi1, &eta1), zerobra_lifted(&ch, &xi1b, &eta1b));
                // T-part of the tilde bracket is the anchor of the result
                let a = tilde_lift(&ch, &xi);
                let b = tilde_lift(&ch, &eta);
                let sb = second_bracket(&ch, &a, &b);
                assert!(is_tilde(&ch, &sb));
                assert_eq!(sb.v, first_bracket(&ch, &a.lift_zero(k + 1), &b.lift_zero(k + 1)).v);
            }
        }
    }

    #[test]
    fn third_bracket_properties() {
        let mut rng = random::rng(26);
        for ch in charts() {
            let (m, r) = (ch.m(), ch.r());
            let k = 2;
            for _ in 0..3 {
                let xt = tilde_lift(&ch, &random::jet(&mut rng, m, r, k + 1, 2));
                let eta = rand_check(&mut rng, &ch, k);
                let th = rand_check(&mut rng, &ch, k);
                // lift independence
                let mut eta1 = eta.lift_zero(k + 1);
                for i in crate::algebroid::jet_dim(m, r, k)..eta1.xi.u.len() {
                    eta1.xi.u[i] = random::poly(&mut rng, m, 2, 2);
                }
                assert_eq!(third_bracket(&ch, &xt, &eta), third_bracket_lifted(&ch, &xt, &eta1));
                // scalar rule
                let f = random::poly(&mut rng, m, 1, 2);
                let g = random::poly(&mut rng, m, 1, 2);
                let lhs = third_bracket(&ch, &xt.scale(&f), &eta.scale(&g));
                let rhs = eta
                    .scale(&f.mul(&ch.vf_apply(&xt.v, &g)))
                    .sub(&xt.project(k).scale(&ch.vf_apply(&eta.v, &f).mul(&g)))
                    .add(&third_bracket(&ch, &xt, &eta).scale(&f.mul(&g)));
                assert_eq!(lhs, rhs);
                // derivation over the first bracket
                let lhs = third_bracket(&ch, &xt.project(k), &first_bracket(&ch, &eta, &th));
                let rhs = first_bracket(&ch, &third_bracket(&ch, &xt, &eta), &th)
                    .add(&first_bracket(&ch, &eta, &third_bracket(&ch, &xt, &th)));
                assert_eq!(lhs, rhs);
            }
        }
    }
}
