//! The pointwise jet-jet part `P_k` of the first bracket.
//!
//! At a point `x` the unit jet `e_{β,l}` is the k-jet of `(y−x)^β/β! f_l`,
//! a combination of the holonomic family `j^k(y^γ f_l)` with coefficients
//! depending on `x`. On holonomic sections the first bracket is
//! `j^{k−1}` of the algebroid bracket, and `P_k` is bilinear over functions,
//! so `P_k(e_b, e_c)` is the `(k−1)`-jet at `y = x` of
//! `[(y−x)^β/β! f_l, (y−x)^{β'}/β'! f_p]`. Writing `y = x + z`, every
//! entry is a Taylor coefficient in `z` of the structure data.

use crate::algebroid::{jet_dim, AlgebroidChart};
use exact_core::{multi, q, MPoly, Mi, QMatrix, Q};
use std::collections::HashMap;

pub struct PTable {
    pub k: i64,
    /// `entries[b][c]` lists `(a, P(e_b, e_c)_a)` over nonzero components.
    pub entries: Vec<Vec<Vec<(usize, MPoly)>>>,
}

fn taylor(p: &MPoly, g: &[u32]) -> MPoly {
    p.deriv_mi(g).scale(&multi::factorial(g).recip())
}

impl PTable {
    pub fn build(alg: &AlgebroidChart, k: i64) -> Self {
        let (m, r) = (alg.m, alg.r);
        let dim = jet_dim(m, r, k);
        let mut entries = vec![vec![Vec::new(); dim]; dim];
        if k < 1 {
            return PTable { k, entries };
        }
        let mis = multi::list_upto(m, k);
        let outs = multi::list_upto(m, k - 1);
        // Taylor coefficients ∂^γ/γ! of the structure data, |γ| ≤ k
        let mut tc: HashMap<(usize, usize, usize, Mi), MPoly> = HashMap::new();
        let mut ta: HashMap<(usize, usize, Mi), MPoly> = HashMap::new();
        for g in &mis {
            for n in 0..r {
                for l in 0..r {
                    for p in 0..r {
                        let t = taylor(&alg.c[n][l][p], g);
                        if !t.is_zero() {
                            tc.insert((n, l, p, g.clone()), t);
                        }
                    }
                }
            }
            for i in 0..m {
                for l in 0..r {
                    let t = taylor(&alg.anchor[i][l], g);
                    if !t.is_zero() {
                        ta.insert((i, l, g.clone()), t);
                    }
                }
            }
        }
        for (bi, b) in mis.iter().enumerate() {
            for (ci, c) in mis.iter().enumerate() {
                let bc = multi::add(b, c);
                let denom = multi::factorial(b) * multi::factorial(c);
                for (ai, a) in outs.iter().enumerate() {
                    if multi::degree(a) + 1 < multi::degree(b).max(multi::degree(c)) {
                        continue;
                    }
                    let fac = multi::factorial(a) / &denom;
                    for l in 0..r {
                        for p in 0..r {
                            for n in 0..r {
                                let mut val = MPoly::zero(m);
                                if let Some(g) = multi::sub(a, &bc) {
                                    if let Some(t) = tc.get(&(n, l, p, g)) {
                                        val = val.add(t);
                                    }
                                }
                                for i in 0..m {
                                    let Some(g) = multi::sub(&multi::add(a, &multi::unit(m, i)), &bc) else {
                                        continue;
                                    };
                                    if n == p && c[i] > 0 {
                                        if let Some(t) = ta.get(&(i, l, g.clone())) {
                                            val = val.add(&t.scale(&q(c[i] as i64)));
                                        }
                                    }
                                    if n == l && b[i] > 0 {
                                        if let Some(t) = ta.get(&(i, p, g)) {
                                            val = val.sub(&t.scale(&q(b[i] as i64)));
                                        }
                                    }
                                }
                                if !val.is_zero() {
                                    entries[bi * r + l][ci * r + p].push((ai * r + n, val.scale(&fac)));
                                }
                            }
                        }
                    }
                }
            }
        }
        PTable { k, entries }
    }
}

/// Rank of the k-jets at `x0` of the holonomic family `y^γ f_l`, `|γ| ≤ k`.
/// Equals the fiber dimension `r·C(m+k, k)` when the family spans.
pub fn spanning_rank(m: usize, r: usize, k: i64, x0: &[Q]) -> usize {
    let mis = multi::list_upto(m, k);
    let dim = jet_dim(m, r, k);
    let mut cols = Vec::new();
    for g in &mis {
        let mono = MPoly::monomial(m, g.clone(), q(1));
        for l in 0..r {
            let mut col = vec![q(0); dim];
            for (ai, a) in mis.iter().enumerate() {
                col[ai * r + l] = mono.deriv_mi(a).eval_q(x0);
            }
            cols.push(col);
        }
    }
    QMatrix::from_cols(&cols, dim).rank()
}
