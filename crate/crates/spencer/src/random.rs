//! Seeded generators for test data. Every generator takes an explicit RNG so
//! reports are reproducible from the seed alone.

use crate::jet::{combos, FormJet, JetSection};
use crate::algebroid::jet_dim;
use exact_core::{multi, qf, MPoly, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small rational in `[-3, 3]` with denominator up to 3.
pub fn small_q(rng: &mut Rand) -> Q {
    qf(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

pub fn nonzero_q(rng: &mut Rand) -> Q {
    loop {
        let c = small_q(rng);
        if c != qf(0, 1) {
            return c;
        }
    }
}

/// Polynomial in `m` variables of total degree ≤ `deg` with up to `terms` terms.
pub fn poly(rng: &mut Rand, m: usize, deg: i64, terms: usize) -> MPoly {
    let mons = multi::list_upto(m, deg);
    let mut p = MPoly::zero(m);
    for _ in 0..terms {
        let mu = mons[rng.gen_range(0..mons.len())].clone();
        p = p.add(&MPoly::monomial(m, mu, small_q(rng)));
    }
    p
}

/// Algebroid section with polynomial components.
pub fn section(rng: &mut Rand, m: usize, r: usize, deg: i64) -> Vec<MPoly> {
    (0..r).map(|_| poly(rng, m, deg, 3)).collect()
}

/// Non-holonomic jet section: every coordinate independent.
pub fn jet(rng: &mut Rand, m: usize, r: usize, k: i64, deg: i64) -> JetSection<MPoly> {
    let u = (0..jet_dim(m, r, k)).map(|_| poly(rng, m, deg, 2)).collect();
    JetSection::from_vec(m, r, k, u)
}

pub fn form(rng: &mut Rand, m: usize, r: usize, p: usize, k: i64, deg: i64) -> FormJet<MPoly> {
    let comps = combos(m, p).iter().map(|_| jet(rng, m, r, k, deg)).collect();
    FormJet { m, r, p, k, comps }
}

/// Constant jet with rational coordinates.
pub fn jet_q(rng: &mut Rand, m: usize, r: usize, k: i64) -> JetSection<Q> {
    let u = (0..jet_dim(m, r, k)).map(|_| small_q(rng)).collect();
    JetSection::from_vec(m, r, k, u)
}

/// Rational point in `[-1, 1]^m`.
pub fn point(rng: &mut Rand, m: usize) -> Vec<Q> {
    (0..m).map(|_| qf(rng.gen_range(-2..=2), rng.gen_range(1..=2))).collect()
}

pub fn below(rng: &mut Rand, n: usize) -> usize {
    rng.gen_range(0..n)
}

/// Non-holonomic field of `k`-jets near the identity: each Taylor coefficient
/// is perturbed with probability ⅓ by an eighth of a random affine polynomial,
/// so the point map stays invertible on the sample box.
pub fn bisection_field(rng: &mut Rand, model: &crate::groupoid::GroupoidModel, k: i64) -> crate::groupoid::BisectionField {
    bisection_field_deg(rng, model, k, 1)
}

/// As [`bisection_field`] with perturbations of total degree `deg`.
pub fn bisection_field_deg(
    rng: &mut Rand,
    model: &crate::groupoid::GroupoidModel,
    k: i64,
    deg: i64,
) -> crate::groupoid::BisectionField {
    let mut s = crate::groupoid::BisectionField::identity(model, k);
    for a in multi::list_upto(model.m, k) {
        for j in 0..model.n {
            if below(rng, 3) == 0 {
                s.perturb(&a, j, &poly(rng, model.m, deg, 2).scale(&qf(1, 8)));
            }
        }
    }
    s
}
