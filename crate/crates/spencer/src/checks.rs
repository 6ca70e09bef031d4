//! Named property checks over models, algebroids, sections and bisection
//! fields. Every check draws its cases from a seeded generator, so a check id
//! `suite.subject.k{k}.seed{s}` always reproduces the same verdict. Failures
//! carry the first offending coefficient (a monomial) or the sample point.

use std::cell::RefCell;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use crate::action::{eval_field, series_point, sigma_star};
use crate::algebroid::{jet_dim, AlgebroidChart, Chart};
use crate::brackets::{
    first_bracket, is_tilde, jet_pairing, prolong_check, second_bracket, third_bracket, third_bracket_lifted,
    tilde_lift, zerobra, zerobra_lifted, CheckJet,
};
use crate::error::Error;
use crate::groupoid::{BisectionField, GroupoidModel, JetBisection};
use crate::jet::{
    delta_sequence_report, prolong, spencer_cohomology_truncated, spencer_d, spencer_d_form, symbol_dim, FormJet,
    JetSection,
};
use crate::nijenhuis::{
    basic_form, chi, chibar, from_formjet, tilde_cochain, tilde_pullback, to_formjet, Form, Frame, NijForm,
};
use crate::nonlinear::*;
use crate::random::{self, Rand};
use exact_core::ring::mat_vec;
use exact_core::{multi, q, qf, MPoly, Ring, Q};

/// Bisection data attached to a model: a global bisection `x ↦ g(x)`
/// (prolonged, hence holonomic) or a seeded non-holonomic field.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldSpec {
    Holonomic(Vec<MPoly>),
    Random { seed: u64, degree: i64 },
}

#[derive(Clone, Debug)]
pub enum Subject {
    Model(Arc<GroupoidModel>),
    Algebroid(Arc<AlgebroidChart>),
    Section { alg: Arc<AlgebroidChart>, xi: Vec<MPoly> },
    Bisection { model: Arc<GroupoidModel>, field: FieldSpec },
}

impl Subject {
    fn algebroid(&self) -> Arc<AlgebroidChart> {
        match self {
            Subject::Model(g) | Subject::Bisection { model: g, .. } => Arc::new(g.extract_algebroid()),
            Subject::Algebroid(a) | Subject::Section { alg: a, .. } => a.clone(),
        }
    }

    fn model(&self) -> Option<Arc<GroupoidModel>> {
        match self {
            Subject::Model(g) | Subject::Bisection { model: g, .. } => Some(g.clone()),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Subject::Model(_) => "model",
            Subject::Algebroid(_) => "algebroid",
            Subject::Section { .. } => "section",
            Subject::Bisection { .. } => "bisection",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub id: String,
    pub suite: String,
    pub statement: String,
    pub status: Status,
    /// Why a check failed or was skipped.
    pub witness: Option<String>,
    /// Cases actually checked.
    pub cases: usize,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Takes {
    Algebroid,
    Model,
}

pub struct SuiteInfo {
    pub name: &'static str,
    pub statement: &'static str,
    pub min_k: i64,
    takes: Takes,
    sections: bool,
    fields: bool,
    run: fn(&Ctx) -> Res,
}

enum Stop {
    Fail(String),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Self {
        Stop::Fail(format!("error: {e}"))
    }
}

type Res = std::result::Result<(), Stop>;

struct Ctx {
    alg: Arc<AlgebroidChart>,
    model: Option<Arc<GroupoidModel>>,
    section: Option<Vec<MPoly>>,
    field: Option<FieldSpec>,
    k: i64,
    samples: usize,
    rng: RefCell<Rand>,
    cases: RefCell<usize>,
    notes: RefCell<Vec<String>>,
}

impl Ctx {
    fn rng(&self) -> std::cell::RefMut<'_, Rand> {
        self.rng.borrow_mut()
    }

    fn case(&self) {
        *self.cases.borrow_mut() += 1;
    }

    fn note(&self, s: String) {
        self.notes.borrow_mut().push(s);
    }

    fn model(&self) -> &GroupoidModel {
        self.model.as_deref().expect("model suites run on models")
    }

    fn sym(&self) -> Chart<MPoly> {
        Chart::symbolic(&self.alg)
    }

    fn section(&self, deg: i64) -> Vec<MPoly> {
        match &self.section {
            Some(xi) => xi.clone(),
            None => random::section(&mut self.rng(), self.alg.m, self.alg.r, deg),
        }
    }

    /// Field of `(k+1)`-jets: the declared one, or a fresh non-holonomic one.
    fn field(&self, k: i64) -> BisectionField {
        let model = self.model();
        match &self.field {
            Some(FieldSpec::Holonomic(g)) => BisectionField::holonomic(model, g, k + 1),
            Some(FieldSpec::Random { seed, degree }) => {
                random::bisection_field_deg(&mut random::rng(*seed), model, k + 1, *degree)
            }
            None => nonholonomic_field(&mut self.rng(), model, k + 1),
        }
    }

    fn holonomic(&self, k: i64) -> BisectionField {
        let model = self.model();
        match &self.field {
            Some(FieldSpec::Holonomic(g)) => BisectionField::holonomic(model, g, k + 1),
            _ => {
                let g: Vec<MPoly> = model
                    .unit
                    .iter()
                    .map(|u| u.add(&random::poly(&mut self.rng(), model.m, 2, 2).scale(&qf(1, 4))))
                    .collect();
                BisectionField::holonomic(model, &g, k + 1)
            }
        }
    }

    fn point(&self) -> Vec<Q> {
        random::point(&mut self.rng(), self.alg.m)
    }

    /// A field and a sample point where it is a local bisection.
    fn sample(&self, gen: impl Fn(&Ctx) -> BisectionField) -> (BisectionField, Vec<Q>) {
        let mut tries = 0;
        loop {
            let s = gen(self);
            let x0 = self.point();
            tries += 1;
            if tries >= 50 || invertible_at(self.model(), &s, &x0) {
                return (s, x0);
            }
        }
    }
}

fn invertible_at(model: &GroupoidModel, s: &BisectionField, x: &[Q]) -> bool {
    point_jacobian(model, s, x, &[]).ok().and_then(|j| exact_core::ring::mat_inv(&j)).is_some()
}

impl Ctx {
    /// Second factor of a composition, a bisection near the image point.
    fn outer(&self, inner: &BisectionField, x0: &[Q]) -> std::result::Result<BisectionField, Stop> {
        let model = self.model();
        let y0 = crate::action::field_target(model, inner, x0, &[])?;
        for _ in 0..50 {
            let s = nonholonomic_field(&mut self.rng(), model, self.k + 1);
            if invertible_at(model, &s, &y0) {
                return Ok(s);
            }
        }
        Err(Stop::Fail(at(&y0, "no invertible outer field found")))
    }
}

/// A random field whose top coefficient is always moved off the prolongation.
fn nonholonomic_field(rng: &mut Rand, model: &GroupoidModel, k: i64) -> BisectionField {
    let mut s = random::bisection_field(rng, model, k);
    let a = multi::list_exact(model.m, k as u32).remove(0);
    s.perturb(&a, 0, &MPoly::constant(model.m, qf(1, 8)));
    s
}

// ---- witnesses ----

pub trait Show: Ring {
    fn show(&self) -> String;
}

impl Show for MPoly {
    /// The leading term only.
    fn show(&self) -> String {
        match self.leading() {
            Some((e, c)) => MPoly::monomial(self.arity(), e.clone(), c.clone()).to_string(),
            None => "0".into(),
        }
    }
}

impl Show for Q {
    fn show(&self) -> String {
        self.to_string()
    }
}

fn fmt_point(x: &[Q]) -> String {
    let parts: Vec<String> = x.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub fn jet_witness<R: Show>(u: &JetSection<R>) -> Option<String> {
    let idx = multi::list_upto(u.m, u.k);
    u.u.iter().position(|c| !c.is_zero()).map(|p| {
        let a = &idx[p / u.r];
        format!("u{}[{}] = {}", multi::fmt_mi(a), p % u.r + 1, u.u[p].show())
    })
}

pub fn form_witness<R: Show>(w: &FormJet<R>) -> Option<String> {
    for (t, c) in w.tuples().iter().zip(&w.comps) {
        if let Some(s) = jet_witness(c) {
            if t.is_empty() {
                return Some(s);
            }
            let t: Vec<String> = t.iter().map(|i| (i + 1).to_string()).collect();
            return Some(format!("dx[{}] ⊗ {s}", t.join(",")));
        }
    }
    None
}

pub fn check_witness<R: Show>(c: &CheckJet<R>) -> Option<String> {
    if let Some(i) = c.v.iter().position(|x| !x.is_zero()) {
        return Some(format!("T[{}] = {}", i + 1, c.v[i].show()));
    }
    jet_witness(&c.xi)
}

fn ensure(ok: bool, w: impl FnOnce() -> String) -> Res {
    if ok {
        Ok(())
    } else {
        Err(Stop::Fail(w()))
    }
}

fn fail(what: &str, w: Option<String>) -> Res {
    match w {
        None => Ok(()),
        Some(w) => Err(Stop::Fail(format!("{what}: {w}"))),
    }
}

fn zero_jet<R: Show>(what: &str, u: &JetSection<R>) -> Res {
    fail(what, jet_witness(u))
}

fn same_jet<R: Show>(what: &str, a: &JetSection<R>, b: &JetSection<R>) -> Res {
    ensure(a.k == b.k && a.u.len() == b.u.len(), || format!("{what}: orders {} and {} differ", a.k, b.k))?;
    zero_jet(what, &a.sub(b))
}

fn zero_form<R: Show>(what: &str, w: &FormJet<R>) -> Res {
    fail(what, form_witness(w))
}

fn same_form<R: Show>(what: &str, a: &FormJet<R>, b: &FormJet<R>) -> Res {
    ensure(a.k == b.k && a.p == b.p, || format!("{what}: shapes differ"))?;
    zero_form(what, &a.sub(b))
}

fn zero_check<R: Show>(what: &str, c: &CheckJet<R>) -> Res {
    fail(what, check_witness(c))
}

fn same_check<R: Show>(what: &str, a: &CheckJet<R>, b: &CheckJet<R>) -> Res {
    ensure(a.k() == b.k(), || format!("{what}: orders {} and {} differ", a.k(), b.k()))?;
    zero_check(what, &a.sub(b))
}

fn at(x0: &[Q], what: &str) -> String {
    format!("{what} at x = {}", fmt_point(x0))
}

fn eval_form(w: &FormJet<MPoly>, x0: &[Q]) -> FormJet<Q> {
    FormJet { m: w.m, r: w.r, p: w.p, k: w.k, comps: w.comps.iter().map(|c| c.map_ring(|p| p.eval_q(x0))).collect() }
}

fn unit(m: usize, i: usize) -> Vec<Q> {
    (0..m).map(|j| if i == j { q(1) } else { q(0) }).collect()
}

// ---- algebroids and groupoids ----

fn algebroid_axioms(c: &Ctx) -> Res {
    c.case();
    c.alg.validate().map_err(|v| Stop::Fail(v.to_string()))
}

fn groupoid_axioms(c: &Ctx) -> Res {
    c.case();
    c.model().validate().map_err(|v| Stop::Fail(v.to_string()))?;
    c.alg.validate().map_err(|v| Stop::Fail(format!("extracted algebroid: {v}")))
}

fn groupoid_extract(c: &Ctx) -> Res {
    let model = c.model();
    let oracle = model.right_invariant_commutators();
    let (n, m) = (model.n, model.m);
    for a in 0..n {
        for l in 0..n {
            for p in 0..n {
                let d = c.alg.c[a][l][p].sub(&oracle[a][l][p]);
                ensure(d.is_zero(), || format!("structure function c^{}_{}{} differs by {}", a + 1, l + 1, p + 1, d.show()))?;
            }
        }
    }
    c.case();
    if model.name.starts_with("pair") {
        ensure(*c.alg == AlgebroidChart::tangent(m), || "pair groupoid does not give the tangent algebroid".into())?;
        // the bracket must be the commutator of vector fields
        let ch = c.sym();
        for _ in 0..c.samples {
            let th = random::section(&mut c.rng(), m, n, 3);
            let mu = random::section(&mut c.rng(), m, n, 3);
            let br = ch.bracket(&th, &mu);
            let want = ch.vf_bracket(&th, &mu);
            for i in 0..m {
                let d = br[i].sub(&want[i]);
                ensure(d.is_zero(), || format!("bracket minus commutator, component {}: {}", i + 1, d.show()))?;
            }
            c.case();
        }
    }
    Ok(())
}

// ---- linear operators ----

fn linear_spencer(c: &Ctx) -> Res {
    let (m, r, k) = (c.alg.m, c.alg.r, c.k);
    if k < 2 {
        c.note("D² needs k ≥ 2; only D∘j^k checked".into());
    }
    for _ in 0..c.samples {
        let xi = c.section(4);
        zero_form("D j^k ξ", &spencer_d(&prolong(&xi, m, k))?)?;
        if k >= 2 {
            let u = random::jet(&mut c.rng(), m, r, k, 3);
            zero_form("D²u", &spencer_d_form(&spencer_d(&u)?)?)?;
            let w = random::form(&mut c.rng(), m, r, 1, k, 2);
            zero_form("D²ω", &spencer_d_form(&spencer_d_form(&w)?)?)?;
        }
        c.case();
    }
    Ok(())
}

fn delta_exact(c: &Ctx) -> Res {
    let (m, r, k) = (c.alg.m, c.alg.r, c.k);
    for j in 0..=k {
        let want = multi::binom_u(m as u64 + j as u64 - 1, j as u64) as usize * r;
        let got = symbol_dim(m, r, j);
        ensure(got == want, || format!("dim γ^{j} = {got}, expected {want}"))?;
    }
    for row in delta_sequence_report(m, r, k) {
        ensure(row.homology == 0, || format!("homology {} at position {}", row.homology, row.position))?;
        c.case();
    }
    Ok(())
}

fn delta_truncated(c: &Ctx) -> Res {
    let (m, r, k) = (c.alg.m, c.alg.r, c.k);
    let rows = spencer_cohomology_truncated(m, r, k, k + 2);
    let last = rows.len() - 1;
    for row in &rows {
        if row.position == 0 || row.position == last {
            c.note(format!("position {}: unasserted (stable homology {})", row.position, row.stable_homology));
            continue;
        }
        ensure(row.stable_homology == 0, || {
            format!("stable homology {} at position {}", row.stable_homology, row.position)
        })?;
        c.case();
    }
    Ok(())
}

// ---- brackets ----

fn rand_check(c: &Ctx, k: i64) -> CheckJet<MPoly> {
    let (m, r) = (c.alg.m, c.alg.r);
    let v = random::section(&mut c.rng(), m, m, 2);
    CheckJet::new(v, random::jet(&mut c.rng(), m, r, k, 2))
}

fn brackets_first(c: &Ctx) -> Res {
    let ch = c.sym();
    let (m, r, k) = (c.alg.m, c.alg.r, c.k);
    for _ in 0..c.samples {
        let (a, b, d) = (rand_check(c, k), rand_check(c, k), rand_check(c, k));
        // Leibniz in the second argument
        let f = random::poly(&mut c.rng(), m, 2, 3);
        let lhs = first_bracket(&ch, &a, &b.scale(&f));
        let rhs = b.project(k - 1).scale(&ch.vf_apply(&a.v, &f)).add(&first_bracket(&ch, &a, &b).scale(&f));
        same_check("Leibniz", &lhs, &rhs)?;
        // Jacobi with one order dropped
        if k >= 2 {
            let jac = |x: &CheckJet<MPoly>, y: &CheckJet<MPoly>, z: &CheckJet<MPoly>| {
                first_bracket(&ch, &first_bracket(&ch, x, y), &z.project(k - 1))
            };
            zero_check("Jacobi", &jac(&a, &b, &d).add(&jac(&b, &d, &a)).add(&jac(&d, &a, &b)))?;
        }
        // tangent arguments give the commutator
        let v = random::section(&mut c.rng(), m, m, 2);
        let w = random::section(&mut c.rng(), m, m, 2);
        let tv = CheckJet::tangent(v.clone(), r, k);
        let br = first_bracket(&ch, &tv, &CheckJet::tangent(w.clone(), r, k));
        same_check("tangent bracket", &br, &CheckJet::tangent(ch.vf_bracket(&v, &w), r, k - 1))?;
        // a tangent against a jet is the covariant derivative
        let xi = random::jet(&mut c.rng(), m, r, k, 2);
        let br = first_bracket(&ch, &tv, &CheckJet::jet(xi.clone()));
        same_check("⟦v, ξ⟧ − i(v)Dξ", &br, &CheckJet::jet(xi.d_along(&v)))?;
        // prolongations pair to the prolonged bracket
        let th = c.section(3);
        let mu = random::section(&mut c.rng(), m, r, 3);
        let lhs = jet_pairing(&ch, &prolong(&th, m, k), &prolong(&mu, m, k));
        same_jet("pairing of prolongations", &lhs, &prolong(&ch.bracket(&th, &mu), m, k - 1))?;
        let tj = prolong_check(&ch, &th, k);
        zero_check("⟦v, j^kθ⟧ for holonomic θ", &first_bracket(&ch, &tv, &CheckJet::jet(tj.xi.clone())).sub(
            &CheckJet::jet(tj.xi.d_along(&v)),
        ))?;
        c.case();
    }
    Ok(())
}

fn brackets_zero(c: &Ctx) -> Res {
    let ch = c.sym();
    let (m, r, k) = (c.alg.m, c.alg.r, c.k);
    for _ in 0..c.samples {
        let th = c.section(3);
        let mu = random::section(&mut c.rng(), m, r, 3);
        let z = zerobra(&ch, &prolong(&th, m, k), &prolong(&mu, m, k));
        same_jet("bracket of prolongations", &z, &prolong(&ch.bracket(&th, &mu), m, k))?;
        let xi = random::jet(&mut c.rng(), m, r, k, 2);
        let eta = random::jet(&mut c.rng(), m, r, k, 2);
        let f = random::poly(&mut c.rng(), m, 2, 3);
        let lhs = zerobra(&ch, &xi, &eta.scale(&f));
        let hf = ch.vf_apply(&ch.anchor_apply(&xi.value()), &f);
        same_jet("Leibniz", &lhs, &zerobra(&ch, &xi, &eta).scale(&f).add(&eta.scale(&hf)))?;
        let sb = second_bracket(&ch, &tilde_lift(&ch, &xi), &tilde_lift(&ch, &eta));
        same_jet("ν of the second bracket", &sb.xi, &zerobra(&ch, &xi, &eta))?;
        c.case();
    }
    Ok(())
}

fn brackets_second(c: &Ctx) -> Res {
    let ch = c.sym();
    let (m, r, k) = (c.alg.m, c.alg.r, c.k);
    let top = jet_dim(m, r, k);
    for _ in 0..c.samples {
        let xi1 = random::jet(&mut c.rng(), m, r, k + 1, 2);
        let eta1 = random::jet(&mut c.rng(), m, r, k + 1, 2);
        let (mut xi1b, mut eta1b) = (xi1.clone(), eta1.clone());
        for i in top..xi1b.u.len() {
            xi1b.u[i] = xi1b.u[i].add(&random::poly(&mut c.rng(), m, 2, 2));
            eta1b.u[i] = eta1b.u[i].sub(&random::poly(&mut c.rng(), m, 2, 2));
        }
        same_jet("lift dependence", &zerobra_lifted(&ch, &xi1, &eta1), &zerobra_lifted(&ch, &xi1b, &eta1b))?;
        let (a, b) = (tilde_lift(&ch, &xi1.project(k)), tilde_lift(&ch, &eta1.project(k)));
        let sb = second_bracket(&ch, &a, &b);
        ensure(is_tilde(&ch, &sb), || "second bracket leaves the tilde elements".into())?;
        let ob = first_bracket(&ch, &a.lift_zero(k + 1), &b.lift_zero(k + 1));
        for i in 0..m {
            let d = sb.v[i].sub(&ob.v[i]);
            ensure(d.is_zero(), || format!("T-part {} differs from the commutator: {}", i + 1, d.show()))?;
        }
        c.case();
    }
    Ok(())
}

fn brackets_third(c: &Ctx) -> Res {
    let ch = c.sym();
    let (m, r, k) = (c.alg.m, c.alg.r, c.k);
    for _ in 0..c.samples {
        let xt = tilde_lift(&ch, &random::jet(&mut c.rng(), m, r, k + 1, 2));
        let eta = rand_check(c, k);
        let th = rand_check(c, k);
        let mut eta1 = eta.lift_zero(k + 1);
        for i in jet_dim(m, r, k)..eta1.xi.u.len() {
            eta1.xi.u[i] = random::poly(&mut c.rng(), m, 2, 2);
        }
        same_check("lift dependence", &third_bracket(&ch, &xt, &eta), &third_bracket_lifted(&ch, &xt, &eta1))?;
        let f = random::poly(&mut c.rng(), m, 1, 2);
        let g = random::poly(&mut c.rng(), m, 1, 2);
        let lhs = third_bracket(&ch, &xt.scale(&f), &eta.scale(&g));
        let rhs = eta
            .scale(&f.mul(&ch.vf_apply(&xt.v, &g)))
            .sub(&xt.project(k).scale(&ch.vf_apply(&eta.v, &f).mul(&g)))
            .add(&third_bracket(&ch, &xt, &eta).scale(&f.mul(&g)));
        same_check("scalar rule", &lhs, &rhs)?;
        let lhs = third_bracket(&ch, &xt.project(k), &first_bracket(&ch, &eta, &th));
        let rhs =
            first_bracket(&ch, &third_bracket(&ch, &xt, &eta), &th).add(&first_bracket(&ch, &eta, &third_bracket(&ch, &xt, &th)));
        same_check("derivation over the first bracket", &lhs, &rhs)?;
        c.case();
    }
    Ok(())
}

// ---- graded brackets of forms ----

fn nijenhuis(c: &Ctx) -> Res {
    let (m, r, k) = (c.alg.m, c.alg.r, c.k);
    let fr = Frame::new(c.sym(), k + 1);
    let nz = |what: &str, w: &NijForm<MPoly>| ensure(w.is_zero(), || format!("{what} is not zero"));
    let b = |x: &NijForm<MPoly>, y: &NijForm<MPoly>| NijForm::bracket(&fr, x, y);
    let ck = chi(&fr, k);
    let cb = chibar(&fr, k);
    nz("[χ,χ]", &b(&ck, &ck)?)?;
    nz("[χ̄,χ̄]", &b(&cb, &cb)?)?;
    if k < 2 {
        c.note("graded Jacobi needs k ≥ 2".into());
    }
    for _ in 0..c.samples {
        let u = random::form(&mut c.rng(), m, r, 1, k, 2);
        let lhs = b(&ck, &from_formjet(&fr, &u))?;
        let lhs = to_formjet(&fr, &lhs).ok_or_else(|| Stop::Fail("[χ,u] is not jet-valued".into()))?;
        same_form("[χ,u] − Du", &lhs, &spencer_d_form(&u)?)?;
        let tu = tilde_cochain(&fr, &u);
        nz("[χ̄,ũ] − (Du)~", &b(&cb, &tu)?.sub(&tilde_cochain(&fr, &spencer_d_form(&u)?)))?;
        let i = random::below(&mut c.rng(), m);
        let w = basic_form(&fr, &[i]).scale(&random::poly(&mut c.rng(), m, 2, 3));
        ensure(ck.lie(&fr, &w)? == w.d(&fr)?, || format!("𝔏(χ)ω ≠ dω for ω along dx{}", i + 1))?;
        let wt = tilde_pullback(&fr, &w);
        ensure(cb.lie(&fr, &wt)? == tilde_pullback(&fr, &w.d(&fr)?), || "𝔏(χ̄)ω̃ ≠ (dω)~".into())?;
        let f = Form::function(random::poly(&mut c.rng(), m, 2, 3));
        ensure(cb.lie(&fr, &f)? == tilde_pullback(&fr, &f.d(&fr)?), || "𝔏(χ̄)f ≠ (df)~".into())?;
        // graded Jacobi and antisymmetry on a random triple; two brackets
        // drop two orders
        if k < 2 {
            c.case();
            continue;
        }
        let rand_form = |p: usize| -> NijForm<MPoly> {
            let mut out = NijForm::zero(m, r, p, k);
            for _ in 0..2 {
                let t: Vec<usize> = (0..p).map(|_| random::below(&mut c.rng(), fr.dim(0))).collect();
                let w = Form::single(t, random::poly(&mut c.rng(), m, 1, 2));
                let a = random::below(&mut c.rng(), fr.dim(k));
                out = out.add(&NijForm::single(m, r, k, w, a));
            }
            out
        };
        let (p, qd, s) = [(1, 1, 1), (0, 1, 1), (1, 0, 2)][random::below(&mut c.rng(), 3)];
        let (u, v, w) = (rand_form(p), rand_form(qd), rand_form(s));
        let lhs = b(&u, &b(&v, &w)?)?;
        let (r1, r2) = (b(&b(&u, &v)?, &w)?, b(&v, &b(&u, &w)?)?);
        let rhs = if (p * qd) % 2 == 0 { r1.add(&r2) } else { r1.sub(&r2) };
        nz(&format!("graded Jacobi in degrees {p},{qd},{s}"), &lhs.sub(&rhs))?;
        let (uv, vu) = (b(&u, &v)?, b(&v, &u)?);
        nz("graded antisymmetry", &if (p * qd) % 2 == 0 { uv.add(&vu) } else { uv.sub(&vu) })?;
        c.case();
    }
    Ok(())
}

// ---- nonlinear complexes ----

fn holonomic_first(c: &Ctx) -> Res {
    for _ in 0..c.samples {
        let (s, x0) = c.sample(|c| c.holonomic(c.k));
        zero_form(&at(&x0, "𝒟j^{k+1}F"), &cal_d(c.model(), &s, &x0, &[])?)?;
        c.case();
    }
    Ok(())
}

fn holonomic_second(c: &Ctx) -> Res {
    for _ in 0..c.samples {
        let (s, x0) = c.sample(|c| c.holonomic(c.k));
        zero_form(&at(&x0, "𝒟̄j^{k+1}F"), &cal_dbar(c.model(), &c.alg, &s, &x0, &[])?)?;
        c.case();
    }
    Ok(())
}

fn dual_first(c: &Ctx) -> Res {
    let model = c.model();
    for _ in 0..c.samples {
        let (s, x0) = c.sample(|c| c.field(c.k));
        let d = cal_d(model, &s, &x0, &[])?;
        let dd = cal_d_dual(model, &s, &x0, &[])?;
        for i in 0..model.m {
            ensure(dd[i].v.iter().all(|x| x.is_zero()), || at(&x0, "dual route has a tangent part"))?;
            same_jet(&at(&x0, &format!("point route vs dual route along ∂{}", i + 1)), &d.comps[i], &dd[i].xi)?;
        }
        c.case();
    }
    Ok(())
}

/// Curvature check at a series point, plus the negative controls.
fn maurer_cartan(c: &Ctx, second: bool) -> Res {
    let model = c.model();
    let m = model.m;
    if m < 2 {
        c.note("one-dimensional base: curvature 2-forms vanish identically".into());
    }
    for _ in 0..c.samples {
        let (s, x0) = c.sample(|c| c.field(c.k));
        let xs = series_point(&x0, 2);
        let ch = Chart::at_point(&c.alg, &x0, 2);
        let curv = if second {
            cal_dbar1(&ch, &cal_dbar(model, &c.alg, &s, &xs, &[])?)?
        } else {
            cal_d1(&ch, &cal_d(model, &s, &xs, &[])?)?
        };
        zero_form(&at(&x0, "curvature"), &form_value(&curv))?;
        if m >= 2 && c.field.is_none() {
            let w = random::form(&mut c.rng(), m, model.n, 1, c.k, 2);
            let sym = c.sym();
            let cw = if second { cal_dbar1(&sym, &w)? } else { cal_d1(&sym, &w)? };
            ensure(!cw.is_zero(), || "negative control: curvature of a random form vanished".into())?;
            let u = if second { cal_dbar(model, &c.alg, &s, &x0, &[])? } else { cal_d(model, &s, &x0, &[])? };
            ensure(!u.is_zero(), || at(&x0, "negative control: operator vanished on a non-holonomic field"))?;
        }
        c.case();
    }
    Ok(())
}

fn mc_first(c: &Ctx) -> Res {
    maurer_cartan(c, false)
}

fn mc_second(c: &Ctx) -> Res {
    maurer_cartan(c, true)
}

fn compose_first(c: &Ctx) -> Res {
    let model = c.model();
    for _ in 0..c.samples {
        let (s1, x0) = c.sample(|c| c.field(c.k));
        let s2 = c.outer(&s1, &x0)?;
        for (i, res) in compose_residual(model, &s2, &s1, &x0)?.iter().enumerate() {
            zero_jet(&at(&x0, &format!("composition law along ∂{}", i + 1)), res)?;
        }
        for (i, res) in inverse_residual(model, &s1, &x0)?.iter().enumerate() {
            zero_jet(&at(&x0, &format!("inversion law along ∂{}", i + 1)), res)?;
        }
        c.case();
    }
    Ok(())
}

fn compose_second(c: &Ctx) -> Res {
    let model = c.model();
    for _ in 0..c.samples {
        let (s1, x0) = c.sample(|c| c.field(c.k));
        let s2 = c.outer(&s1, &x0)?;
        for (i, res) in compose_bar_residual(model, &c.alg, &s2, &s1, &x0)?.iter().enumerate() {
            zero_check(&at(&x0, &format!("composition law along ∂{}", i + 1)), res)?;
        }
        c.case();
    }
    Ok(())
}

fn linearize(c: &Ctx, second: bool) -> Res {
    let model = c.model();
    for _ in 0..c.samples {
        let xi = random::jet(&mut c.rng(), model.m, model.n, c.k + 1, 2);
        let x0 = c.point();
        let (l1, l2) = linearizations(model, &c.alg, &xi, &x0)?;
        let want = eval_form(&spencer_d(&xi)?, &x0);
        same_form(&at(&x0, "ε-derivative minus Dξ"), if second { &l2 } else { &l1 }, &want)?;
        c.case();
    }
    Ok(())
}

fn linearize_first(c: &Ctx) -> Res {
    linearize(c, false)
}

fn linearize_second(c: &Ctx) -> Res {
    linearize(c, true)
}

fn tstar_second(c: &Ctx) -> Res {
    let model = c.model();
    let (m, n, k) = (model.m, model.n, c.k);
    for _ in 0..c.samples {
        let (s, x0) = c.sample(|c| c.field(k));
        // cal_dbar itself rejects values violating the t_* relation
        cal_dbar(model, &c.alg, &s, &x0, &[])?;
        let jb = eval_field(model, &s, &x0, &[])?.target_jacobian(model);
        for i in 0..m {
            let e = unit(m, i);
            let lhs = sigma_star(model, &s, &x0, &[], &CheckJet::tangent(e.clone(), n, k))?;
            let ev = cal_dbar_along(model, &s, &x0, &[], &e)?;
            let rhs = CheckJet::tangent(mat_vec(&jb, &e), n, k).add(&sigma_star(model, &s, &x0, &[], &ev)?);
            same_check(&at(&x0, &format!("σ_*∂{0} − f_*∂{0} − σ_*(i(∂{0})𝒟̄σ)", i + 1)), &lhs, &rhs)?;
        }
        c.case();
    }
    Ok(())
}

fn image(c: &Ctx, second: bool) -> Res {
    let model = c.model();
    let (m, n, k) = (model.m, model.n, c.k);
    let member = |x0: &[Q], x: &FormJet<Q>| {
        if second {
            btilde_membership(&c.alg, x0, x)
        } else {
            b_membership(&c.alg, x0, x)
        }
    };
    let op = |s: &BisectionField, x0: &[Q]| {
        if second {
            cal_dbar(model, &c.alg, s, x0, &[])
        } else {
            cal_d(model, s, x0, &[])
        }
    };
    let mut hits = 0;
    let mut tries = 0;
    while hits < c.samples {
        tries += 1;
        ensure(tries <= 20 * c.samples.max(1), || format!("only {hits} member points in {} draws", tries - 1))?;
        let (s, x0) = c.sample(|c| c.field(k));
        ensure(member(&x0, &op(&s, &x0)?)?, || at(&x0, "membership rejects the operator's value"))?;
        let x = FormJet { m, r: n, p: 1, k, comps: (0..m).map(|_| random::jet_q(&mut c.rng(), m, n, k)).collect() };
        let solved = if second { btilde_solve(model, &c.alg, &x0, &x) } else { b_solve(model, &c.alg, &x0, &x) };
        if member(&x0, &x)? {
            same_form(&at(&x0, "round trip of the solver"), &op(&solved?, &x0)?, &x)?;
            hits += 1;
            c.case();
        } else {
            ensure(matches!(solved, Err(Error::NotInvertible(_))), || at(&x0, "solver accepted a non-member"))?;
        }
    }
    Ok(())
}

fn image_first(c: &Ctx) -> Res {
    image(c, false)
}

fn image_second(c: &Ctx) -> Res {
    image(c, true)
}

// ---- quotient complex ----

fn soph_ideal(c: &Ctx) -> Res {
    let (m, n, k) = (c.alg.m, c.alg.r, c.k);
    let z = MPoly::zero(m);
    let q2 = SophQuotient::new(m, n, k, 2)?;
    let sym = c.sym();
    for _ in 0..c.samples {
        let x0 = c.point();
        let u = random::form(&mut c.rng(), m, n, 1, k, 2);
        let s = random::jet(&mut c.rng(), m, n, k + 1, 2);
        let sw = FormJet { m, r: n, p: 0, k: k + 1, comps: vec![s] };
        let br = tilde_bracket(&sym, &u, &delta_bar(&sw, &z));
        ensure(q2.contains(&eval_form(&br, &x0)), || at(&x0, "[u, δ̄s] leaves the δ̄-image"))?;
        c.case();
    }
    Ok(())
}

fn soph_dhat(c: &Ctx) -> Res {
    let (m, n, k) = (c.alg.m, c.alg.r, c.k);
    let z = MPoly::zero(m);
    let q1 = SophQuotient::new(m, n, k, 1)?;
    let q2 = SophQuotient::new(m, n, k, 2)?;
    for _ in 0..c.samples {
        let x0 = c.point();
        let u0 = random::jet(&mut c.rng(), m, n, k, 2);
        let w0 = FormJet { m, r: n, p: 0, k, comps: vec![u0.clone()] };
        let top = random::jet(&mut c.rng(), m, n, k + 1, 2);
        let mut other = u0.lift_zero(k + 1, &z);
        for i in jet_dim(m, n, k)..other.u.len() {
            other.u[i] = top.u[i].clone();
        }
        let a = dhat(&w0, &z)?;
        let mut b = spencer_d_form(&FormJet { m, r: n, p: 0, k: k + 1, comps: vec![other] })?;
        b.k = k;
        ensure(q1.equal(&eval_form(&a, &x0), &eval_form(&b, &x0)), || at(&x0, "D̂ depends on the lift"))?;
        let a2 = eval_form(&dhat(&a, &z)?, &x0);
        ensure(q2.contains(&a2), || at(&x0, &format!("D̂² class is nonzero, {}", form_witness(&a2).unwrap_or_default())))?;
        c.case();
    }
    Ok(())
}

fn soph_cal_d(c: &Ctx) -> Res {
    let model = c.model();
    let (m, n, k) = (model.m, model.n, c.k);
    let q1 = SophQuotient::new(m, n, k, 1)?;
    let q2 = SophQuotient::new(m, n, k, 2)?;
    let sym = c.sym();
    for _ in 0..c.samples {
        let (f1, x0) = c.sample(|c| lift_field(&random::bisection_field(&mut c.rng(), model, k), m));
        let mut f2 = f1.clone();
        for a in multi::list_exact(m, (k + 1) as u32) {
            f2.perturb(&a, 0, &random::poly(&mut c.rng(), m, 1, 2));
        }
        let c1 = cal_dbar(model, &c.alg, &f1, &x0, &[])?;
        let c2 = cal_dbar(model, &c.alg, &f2, &x0, &[])?;
        ensure(q1.equal(&c1, &c2), || at(&x0, "𝒟̂ depends on the lift"))?;
        let xs = series_point(&x0, 2);
        let ch = Chart::at_point(&c.alg, &x0, 2);
        let cur = form_value(&dhat1(&ch, &cal_dbar(model, &c.alg, &f1, &xs, &[])?)?);
        ensure(q2.contains(&cur), || at(&x0, &format!("𝒟̂₁𝒟̂ class is nonzero, {}", form_witness(&cur).unwrap_or_default())))?;
        let mut hol = c.holonomic(k);
        for _ in 0..50 {
            if invertible_at(model, &hol, &x0) {
                break;
            }
            hol = c.holonomic(k);
        }
        ensure(q1.contains(&cal_dbar(model, &c.alg, &hol, &x0, &[])?), || at(&x0, "holonomic field has a nonzero class"))?;
        if m >= 2 {
            let u = random::form(&mut c.rng(), m, n, 1, k, 2);
            ensure(!q2.contains(&eval_form(&dhat1(&sym, &u)?, &x0)), || {
                at(&x0, "negative control: curvature class of a random form vanished")
            })?;
        }
        c.case();
    }
    Ok(())
}

fn soph_partial(c: &Ctx) -> Res {
    let model = c.model();
    let (m, n, k) = (model.m, model.n, c.k);
    for _ in 0..c.samples {
        let mut f = BisectionField::identity(model, k + 1);
        for a in multi::list_exact(m, (k + 1) as u32) {
            for j in 0..n {
                f.perturb(&a, j, &random::poly(&mut c.rng(), m, 1, 2));
            }
        }
        let x0 = c.point();
        let d = partial_map(model, &eval_field(model, &f, &x0, &[])?)?;
        let w = FormJet { m, r: n, p: 0, k: k + 1, comps: vec![d.to_jet(&q(0))] };
        same_form(&at(&x0, "𝒟̄F + δ̄(∂F)"), &cal_dbar(model, &c.alg, &f, &x0, &[])?, &delta_bar(&w, &q(0)).neg())?;
        let g = nonholonomic_field(&mut c.rng(), model, k + 1);
        let gj = eval_field(model, &g, &x0, &[])?;
        if gj.truncate(k) != JetBisection::identity(model, &x0, k) {
            ensure(matches!(partial_map(model, &gj), Err(Error::NotPartial(_))), || {
                at(&x0, "a field off the unit was accepted as partial")
            })?;
        }
        c.case();
    }
    Ok(())
}

macro_rules! suite {
    ($name:expr, $st:expr, $k:expr, $takes:ident, $sec:expr, $fld:expr, $f:ident) => {
        SuiteInfo {
            name: $name,
            statement: $st,
            min_k: $k,
            takes: Takes::$takes,
            sections: $sec,
            fields: $fld,
            run: $f,
        }
    };
}

pub const SUITES: &[SuiteInfo] = &[
    suite!("algebroid.axioms", "bracket antisymmetry, Jacobi, anchor morphism and Leibniz rule hold identically", 0, Algebroid, false, false, algebroid_axioms),
    suite!("groupoid.axioms", "groupoid axioms hold identically and the extracted algebroid is valid", 0, Model, false, false, groupoid_axioms),
    suite!("groupoid.extract", "extracted structure functions equal right-invariant field commutators; pair groupoids give the tangent algebroid", 0, Model, false, false, groupoid_extract),
    suite!("linear.spencer", "D∘j^k = 0 on sections and D² = 0 on jets and 1-forms", 1, Algebroid, true, false, linear_spencer),
    suite!("delta.exact", "the δ-sequence is exact and dim γ^j = C(m+j−1, j)·r", 1, Algebroid, false, false, delta_exact),
    suite!("delta.truncated", "degree-capped linear complex has no stable homology away from its edges", 1, Algebroid, false, false, delta_truncated),
    suite!("brackets.first", "first bracket: Leibniz, Jacobi with order drop, tangent and holonomic cases", 1, Algebroid, true, false, brackets_first),
    suite!("brackets.zero", "jet bracket: prolongations, Leibniz rule, agreement with the second bracket", 0, Algebroid, true, false, brackets_zero),
    suite!("brackets.second", "second bracket is lift-independent and stays among tilde elements", 0, Algebroid, false, false, brackets_second),
    suite!("brackets.third", "third bracket: lift independence, scalar rule, derivation of the first bracket", 1, Algebroid, false, false, brackets_third),
    suite!("nijenhuis", "[χ,χ] = 0, [χ,u] = Du, 𝔏(χ) = d and tilde analogues; graded Jacobi", 1, Algebroid, false, false, nijenhuis),
    suite!("holonomic.first", "𝒟 vanishes on prolonged bisections", 0, Model, false, true, holonomic_first),
    suite!("holonomic.second", "𝒟̄ vanishes on prolonged bisections", 0, Model, false, true, holonomic_second),
    suite!("dual.first", "𝒟 by ε-curves equals 𝒟 through the σ_* matrix", 0, Model, false, true, dual_first),
    suite!("mc.first", "𝒟₁𝒟σ = 0; controls: 𝒟₁ of a random form and 𝒟σ are nonzero", 1, Model, false, true, mc_first),
    suite!("mc.second", "𝒟̄₁𝒟̄σ = 0; controls: 𝒟̄₁ of a random form and 𝒟̄σ are nonzero", 1, Model, false, true, mc_second),
    suite!("compose.first", "𝒟(σ′σ) = 𝒟σ + σ_*⁻¹𝒟σ′ and 𝒟σ⁻¹ = −σ_*𝒟σ", 0, Model, false, true, compose_first),
    suite!("compose.second", "𝒟̄(σ′σ) = 𝒟̄σ + σ_*⁻¹𝒟̄σ′", 0, Model, false, true, compose_second),
    suite!("linearize.first", "ε-derivative of 𝒟(id + εξ) is Dξ", 0, Model, false, false, linearize_first),
    suite!("linearize.second", "ε-derivative of 𝒟̄(id + εξ) is Dξ", 0, Model, false, false, linearize_second),
    suite!("tstar.second", "values of 𝒟̄σ satisfy the target relation and σ_*v = f_*v + σ_*(i(v)𝒟̄σ)", 0, Model, false, true, tstar_second),
    suite!("image.first", "membership accepts 𝒟σ; the solver round-trips member points", 0, Model, false, true, image_first),
    suite!("image.second", "membership accepts 𝒟̄σ; the solver round-trips member points", 0, Model, false, true, image_second),
    suite!("soph.ideal", "[u, δ̄s] lies in the δ̄-image", 1, Algebroid, false, false, soph_ideal),
    suite!("soph.dhat", "D̂ is lift-independent and D̂² = 0 on classes", 1, Algebroid, false, false, soph_dhat),
    suite!("soph.calD", "𝒟̂ is lift-independent, 𝒟̂₁𝒟̂ = 0 and holonomic fields give zero", 1, Model, false, false, soph_cal_d),
    suite!("soph.partial", "𝒟̄F = −δ̄(∂F) for F with unit k-jet", 0, Model, false, false, soph_partial),
];

pub fn suite(name: &str) -> Option<&'static SuiteInfo> {
    SUITES.iter().find(|s| s.name == name)
}

pub fn check_id(suite: &str, label: &str, k: i64, seed: u64) -> String {
    format!("{suite}.{label}.k{k}.seed{seed}")
}

impl SuiteInfo {
    /// Whether this suite takes a subject of the given kind
    /// (`model`, `algebroid`, `section` or `bisection`).
    pub fn accepts(&self, kind: &str) -> std::result::Result<(), String> {
        match kind {
            "section" if !self.sections => Err(format!("{} does not take a section", self.name)),
            "bisection" if !self.fields => Err(format!("{} does not take a bisection", self.name)),
            "algebroid" | "section" if self.takes == Takes::Model => {
                Err(format!("{} needs a groupoid model, got {kind}", self.name))
            }
            _ => Ok(()),
        }
    }
}

/// Whether `suite` can run on this subject at all (ignoring `k`).
pub fn applies(info: &SuiteInfo, subj: &Subject) -> std::result::Result<(), String> {
    info.accepts(subj.kind())
}

/// Run one check. Never panics: panics inside a suite become failures.
pub fn run_check(suite_name: &str, label: &str, subj: &Subject, k: i64, seed: u64, samples: usize) -> Outcome {
    let id = check_id(suite_name, label, k, seed);
    let mut out = Outcome {
        id,
        suite: suite_name.to_string(),
        statement: String::new(),
        status: Status::Skipped,
        witness: None,
        cases: 0,
        notes: Vec::new(),
    };
    let Some(info) = suite(suite_name) else {
        out.status = Status::Fail;
        out.witness = Some(format!("unknown suite {suite_name}"));
        return out;
    };
    out.statement = info.statement.to_string();
    if let Err(why) = applies(info, subj) {
        out.witness = Some(why);
        return out;
    }
    if k < info.min_k {
        out.witness = Some(format!("needs k ≥ {}", info.min_k));
        return out;
    }
    let res = catch_unwind(AssertUnwindSafe(|| {
        let ctx = Ctx {
            alg: subj.algebroid(),
            model: subj.model(),
            section: match subj {
                Subject::Section { xi, .. } => Some(xi.clone()),
                _ => None,
            },
            field: match subj {
                Subject::Bisection { field, .. } => Some(field.clone()),
                _ => None,
            },
            k,
            samples,
            rng: RefCell::new(random::rng(seed)),
            cases: RefCell::new(0),
            notes: RefCell::new(Vec::new()),
        };
        let r = (info.run)(&ctx);
        (r, ctx.cases.into_inner(), ctx.notes.into_inner())
    }));
    match res {
        Ok((r, cases, notes)) => {
            out.cases = cases;
            out.notes = notes;
            match r {
                Ok(()) => out.status = Status::Pass,
                Err(Stop::Fail(w)) => {
                    out.status = Status::Fail;
                    out.witness = Some(w);
                }
            }
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            out.status = Status::Fail;
            out.witness = Some(format!("internal error: {msg}"));
        }
    }
    out
}
