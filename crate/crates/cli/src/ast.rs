//! Scenario syntax tree. Polynomials are stored already parsed.

use exact_core::MPoly;

/// Source position, 1-based. Spans never take part in equality, so a
/// reparsed printout compares equal to the original tree.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupSpec {
    Abelian(usize),
    Heisenberg,
}

impl GroupSpec {
    pub fn dim(&self) -> usize {
        match self {
            GroupSpec::Abelian(q) => *q,
            GroupSpec::Heisenberg => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelCtor {
    Pair { m: usize },
    GroupBundle { m: usize, group: GroupSpec },
    Gauge { m: usize, group: GroupSpec },
    /// `act` has arity `m + dim(group)`: base coordinates, then group ones.
    Action { m: usize, group: GroupSpec, act: Vec<MPoly> },
    Unipotent,
}

impl ModelCtor {
    /// Base and fiber dimensions.
    pub fn dims(&self) -> (usize, usize) {
        match self {
            ModelCtor::Pair { m } => (*m, *m),
            ModelCtor::GroupBundle { m, group } => (*m, group.dim()),
            ModelCtor::Gauge { m, group } => (*m, m + group.dim()),
            ModelCtor::Action { m, group, .. } => (*m, group.dim()),
            ModelCtor::Unipotent => (2, 3),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AlgDef {
    FromModel(String),
    Tangent { m: usize },
    Sl2Line,
    So3 { m: usize },
    /// `bracket` lists `[e_l, e_p] = Σ c^n e_n` for `l < p`, 1-based.
    Explicit { m: usize, r: usize, anchor: Vec<Vec<MPoly>>, bracket: Vec<(usize, usize, Vec<MPoly>)> },
}

#[derive(Clone, Debug, PartialEq)]
pub enum SecDef {
    Literal(Vec<MPoly>),
    Random { seed: u64, degree: i64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeclKind {
    Model(ModelCtor),
    Algebroid(AlgDef),
    Section { on: String, def: SecDef },
    Bisection { on: String, def: SecDef },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub name: String,
    pub kind: DeclKind,
    /// Base dimension and rank, fixed at parse time.
    pub m: usize,
    pub r: usize,
    pub span: Span,
}

impl Decl {
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            DeclKind::Model(_) => "model",
            DeclKind::Algebroid(_) => "algebroid",
            DeclKind::Section { .. } => "section",
            DeclKind::Bisection { .. } => "bisection",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckDecl {
    pub suite: String,
    pub subject: String,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Scenario {
    pub name: Option<String>,
    pub decls: Vec<Decl>,
    pub k: Option<i64>,
    pub k_max: Option<i64>,
    pub seeds: Vec<u64>,
    pub samples: Option<usize>,
    pub checks: Vec<CheckDecl>,
    pub format: Option<Format>,
}

impl Scenario {
    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name == name)
    }

    /// Orders actually run: `k..=K`, default `k = 1`.
    pub fn orders(&self) -> std::ops::RangeInclusive<i64> {
        let k = self.k.unwrap_or(1);
        k..=self.k_max.unwrap_or(k).max(k)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }
}

pub const DEFAULT_SAMPLES: usize = 5;
pub const MAX_ORDER: i64 = 4;
pub const MAX_SAMPLES: usize = 200;

/// Variable names `x1..xm`.
pub fn base_names(m: usize) -> Vec<String> {
    MPoly::default_names(m)
}

/// Variable names of action polynomials: `x1..xm, h1..hq`.
pub fn action_names(m: usize, q: usize) -> Vec<String> {
    let mut v = base_names(m);
    v.extend((1..=q).map(|i| format!("h{i}")));
    v
}
