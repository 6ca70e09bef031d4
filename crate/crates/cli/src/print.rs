//! Canonical printer. `parse(print(s)) == s` for any parsed scenario.

use crate::ast::*;
use exact_core::MPoly;

fn list(ps: &[MPoly], names: &[String]) -> String {
    let v: Vec<String> = ps.iter().map(|p| p.to_string_with(names)).collect();
    format!("[{}]", v.join(", "))
}

fn group(g: &GroupSpec) -> String {
    match g {
        GroupSpec::Abelian(q) => format!("abelian({q})"),
        GroupSpec::Heisenberg => "heisenberg".into(),
    }
}

fn values(def: &SecDef, m: usize) -> String {
    match def {
        SecDef::Literal(ps) => list(ps, &base_names(m)),
        SecDef::Random { seed, degree } => format!("random(seed={seed}, degree={degree})"),
    }
}

/// One declaration, without a trailing newline.
pub fn print_decl(d: &Decl) -> String {
    match &d.kind {
        DeclKind::Model(c) => {
            let rhs = match c {
                ModelCtor::Pair { m } => format!("pair(m={m})"),
                ModelCtor::GroupBundle { m, group: g } => format!("groupbundle(m={m}, group={})", group(g)),
                ModelCtor::Gauge { m, group: g } => format!("gauge(m={m}, group={})", group(g)),
                ModelCtor::Action { m, group: g, act } => {
                    format!("action(m={m}, group={}, act={})", group(g), list(act, &action_names(*m, g.dim())))
                }
                ModelCtor::Unipotent => "unipotent()".into(),
            };
            format!("model {} = {rhs}", d.name)
        }
        DeclKind::Algebroid(a) => {
            let rhs = match a {
                AlgDef::FromModel(p) => format!("from_model({p})"),
                AlgDef::Tangent { m } => format!("tangent(m={m})"),
                AlgDef::Sl2Line => "sl2line()".into(),
                AlgDef::So3 { m } => format!("so3(m={m})"),
                AlgDef::Explicit { m, r, anchor, bracket } => {
                    let names = base_names(*m);
                    let rows: Vec<String> = anchor.iter().map(|row| list(row, &names)).collect();
                    let br: Vec<String> =
                        bracket.iter().map(|(l, p, v)| format!("({l},{p})={}", list(v, &names))).collect();
                    format!("explicit(m={m}, r={r}, anchor=[{}], bracket=[{}])", rows.join(", "), br.join(", "))
                }
            };
            format!("algebroid {} = {rhs}", d.name)
        }
        DeclKind::Section { on, def } => format!("section {} on {on} = {}", d.name, values(def, d.m)),
        DeclKind::Bisection { on, def } => format!("bisection {} on {on} = {}", d.name, values(def, d.m)),
    }
}

pub fn print_scenario(sc: &Scenario) -> String {
    let mut out = String::new();
    if let Some(n) = &sc.name {
        out.push_str(&format!("scenario \"{n}\"\n"));
    }
    for d in &sc.decls {
        out.push_str(&print_decl(d));
        out.push('\n');
    }
    if let Some(k) = sc.k {
        out.push_str(&format!("order k = {k}\n"));
    }
    if let Some(k) = sc.k_max {
        out.push_str(&format!("order K = {k}\n"));
    }
    if !sc.seeds.is_empty() {
        let s: Vec<String> = sc.seeds.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("seed {}\n", s.join(", ")));
    }
    if let Some(n) = sc.samples {
        out.push_str(&format!("samples {n}\n"));
    }
    for c in &sc.checks {
        out.push_str(&format!("check {} on {}\n", c.suite, c.subject));
    }
    match sc.format {
        Some(Format::Text) => out.push_str("output format=text\n"),
        Some(Format::Json) => out.push_str("output format=json\n"),
        None => {}
    }
    out
}
