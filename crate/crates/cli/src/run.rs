//! Turning a parsed scenario into subjects and running its checks.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use exact_core::MPoly;
use spencer_core::checks::{check_id, run_check, suite, FieldSpec, Outcome, Status, Subject};
use spencer_core::groupoid::{Group, GroupoidModel};
use spencer_core::{random, AlgebroidChart};

use crate::ast::*;
use crate::print::print_decl;
use crate::report::*;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Suite name, or a full check id to run that single check.
    pub suite: Option<String>,
    /// Overrides both `k` and `K`.
    pub k: Option<i64>,
    /// Overrides the scenario seeds.
    pub seed: Option<u64>,
    pub timing: bool,
}

/// One planned check: suite, subject name, order, seed.
#[derive(Clone, Debug, PartialEq)]
pub struct Planned {
    pub id: String,
    pub suite: String,
    pub subject: String,
    pub k: i64,
    pub seed: u64,
}

fn orders(sc: &Scenario, opts: &RunOptions) -> (i64, i64) {
    match opts.k {
        Some(k) => (k, k),
        None => {
            let r = sc.orders();
            (*r.start(), *r.end())
        }
    }
}

fn seeds(sc: &Scenario, opts: &RunOptions) -> Vec<u64> {
    match opts.seed {
        Some(s) => vec![s],
        None => sc.seeds.clone(),
    }
}

/// All checks the scenario would run, in report order.
pub fn plan(sc: &Scenario, opts: &RunOptions) -> Vec<Planned> {
    let (k0, k1) = orders(sc, opts);
    let mut out = Vec::new();
    for c in &sc.checks {
        for k in k0..=k1 {
            for &seed in &seeds(sc, opts) {
                let id = check_id(&c.suite, &c.subject, k, seed);
                let keep = match &opts.suite {
                    None => true,
                    Some(f) => *f == c.suite || *f == id,
                };
                if keep {
                    out.push(Planned { id, suite: c.suite.clone(), subject: c.subject.clone(), k, seed });
                }
            }
        }
    }
    out
}

pub fn group(g: &GroupSpec) -> Group {
    match g {
        GroupSpec::Abelian(q) => Group::abelian(*q),
        GroupSpec::Heisenberg => Group::heisenberg(),
    }
}

pub fn model(c: &ModelCtor) -> GroupoidModel {
    match c {
        ModelCtor::Pair { m } => GroupoidModel::pair(*m),
        ModelCtor::GroupBundle { m, group: g } => GroupoidModel::group_bundle(*m, group(g)),
        ModelCtor::Gauge { m, group: g } => GroupoidModel::gauge(*m, group(g)),
        ModelCtor::Action { m, group: g, act } => GroupoidModel::action(*m, group(g), act.clone()),
        ModelCtor::Unipotent => GroupoidModel::unipotent_action(),
    }
}

/// Structure functions `c[n][l][p]` from the listed `l < p` brackets.
pub fn explicit_chart(name: &str, m: usize, r: usize, anchor: &[Vec<MPoly>], bracket: &[(usize, usize, Vec<MPoly>)]) -> AlgebroidChart {
    let mut c = vec![vec![vec![MPoly::zero(m); r]; r]; r];
    for (l, p, v) in bracket {
        for (n, val) in v.iter().enumerate() {
            c[n][l - 1][p - 1] = val.clone();
            c[n][p - 1][l - 1] = val.neg();
        }
    }
    AlgebroidChart::new(name, m, r, anchor.to_vec(), c)
}

enum Built {
    Model(Arc<GroupoidModel>),
    Alg(Arc<AlgebroidChart>),
    Other(Subject),
}

impl Built {
    fn subject(&self) -> Subject {
        match self {
            Built::Model(g) => Subject::Model(g.clone()),
            Built::Alg(a) => Subject::Algebroid(a.clone()),
            Built::Other(s) => s.clone(),
        }
    }

    fn alg(&self) -> Option<Arc<AlgebroidChart>> {
        match self {
            Built::Model(g) => Some(Arc::new(g.extract_algebroid())),
            Built::Alg(a) => Some(a.clone()),
            Built::Other(_) => None,
        }
    }
}

fn build(d: &Decl, done: &HashMap<String, Result<Built, String>>) -> Result<Built, String> {
    let dep = |name: &str| -> Result<&Built, String> {
        match done.get(name) {
            Some(Ok(b)) => Ok(b),
            Some(Err(e)) => Err(format!("`{name}` could not be built: {e}")),
            None => Err(format!("`{name}` is not declared")),
        }
    };
    Ok(match &d.kind {
        DeclKind::Model(c) => Built::Model(Arc::new(model(c))),
        DeclKind::Algebroid(a) => Built::Alg(Arc::new(match a {
            AlgDef::FromModel(p) => match dep(p)? {
                Built::Model(g) => g.extract_algebroid(),
                _ => return Err(format!("`{p}` is not a model")),
            },
            AlgDef::Tangent { m } => AlgebroidChart::tangent(*m),
            AlgDef::Sl2Line => AlgebroidChart::sl2_line(),
            AlgDef::So3 { m } => AlgebroidChart::so3_bundle(*m),
            AlgDef::Explicit { m, r, anchor, bracket } => explicit_chart(&d.name, *m, *r, anchor, bracket),
        })),
        DeclKind::Section { on, def } => {
            let alg = dep(on)?.alg().ok_or_else(|| format!("`{on}` has no algebroid"))?;
            let xi = match def {
                SecDef::Literal(v) => v.clone(),
                SecDef::Random { seed, degree } => random::section(&mut random::rng(*seed), d.m, d.r, *degree),
            };
            Built::Other(Subject::Section { alg, xi })
        }
        DeclKind::Bisection { on, def } => {
            let model = match dep(on)? {
                Built::Model(g) => g.clone(),
                _ => return Err(format!("`{on}` is not a model")),
            };
            let field = match def {
                SecDef::Literal(v) => FieldSpec::Holonomic(v.clone()),
                SecDef::Random { seed, degree } => FieldSpec::Random { seed: *seed, degree: *degree },
            };
            Built::Other(Subject::Bisection { model, field })
        }
    })
}

fn panic_text(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

/// Build every declared subject. Construction failures are kept per name
/// and surface as failed checks.
fn build_all(sc: &Scenario) -> HashMap<String, Result<Built, String>> {
    let mut done = HashMap::new();
    for d in &sc.decls {
        let b = catch_unwind(AssertUnwindSafe(|| build(d, &done)))
            .unwrap_or_else(|p| Err(format!("internal error: {}", panic_text(p))));
        done.insert(d.name.clone(), b);
    }
    done
}

pub fn environment(sc: &Scenario, opts: &RunOptions) -> Environment {
    let (k, k_max) = orders(sc, opts);
    Environment {
        orders: Orders { k, k_max },
        seeds: seeds(sc, opts),
        samples: sc.samples(),
        subjects: sc
            .decls
            .iter()
            .map(|d| SubjectEcho { name: d.name.clone(), kind: d.kind_name().into(), m: d.m, r: d.r })
            .collect(),
    }
}

pub fn run_scenario(sc: &Scenario, opts: &RunOptions) -> Report {
    let planned = plan(sc, opts);
    let built = if planned.is_empty() { HashMap::new() } else { build_all(sc) };
    let mut checks = Vec::new();
    let mut summary = Summary::default();
    for p in planned {
        let t = Instant::now();
        let o = match built.get(&p.subject) {
            Some(Ok(b)) => run_check(&p.suite, &p.subject, &b.subject(), p.k, p.seed, sc.samples()),
            other => {
                let why = match other {
                    Some(Err(e)) => e.clone(),
                    _ => format!("`{}` is not declared", p.subject),
                };
                Outcome {
                    id: p.id.clone(),
                    suite: p.suite.clone(),
                    statement: suite(&p.suite).map(|i| i.statement.to_string()).unwrap_or_default(),
                    status: Status::Fail,
                    witness: Some(format!("subject unavailable: {why}")),
                    cases: 0,
                    notes: Vec::new(),
                }
            }
        };
        let millis = opts.timing.then(|| t.elapsed().as_millis() as u64);
        summary.total += 1;
        match o.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => summary.failed += 1,
            Status::Skipped => summary.skipped += 1,
        }
        checks.push(CheckRecord {
            id: o.id,
            suite: p.suite,
            subject: p.subject,
            k: p.k,
            seed: p.seed,
            statement: o.statement,
            status: o.status.as_str().into(),
            cases: o.cases,
            witness: o.witness,
            notes: o.notes,
            millis,
        });
    }
    Report {
        scenario: ScenarioEcho { name: sc.name.clone(), declarations: sc.decls.iter().map(print_decl).collect() },
        environment: environment(sc, opts),
        checks,
        summary,
    }
}
