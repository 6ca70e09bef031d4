//! Check reports: JSON with a fixed key order, or a text table.

use serde::Serialize;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub scenario: ScenarioEcho,
    pub environment: Environment,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ScenarioEcho {
    pub name: Option<String>,
    /// Declarations in canonical form.
    pub declarations: Vec<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Orders {
    pub k: i64,
    #[serde(rename = "K")]
    pub k_max: i64,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SubjectEcho {
    pub name: String,
    pub kind: String,
    pub m: usize,
    pub r: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Environment {
    pub orders: Orders,
    pub seeds: Vec<u64>,
    pub samples: usize,
    pub subjects: Vec<SubjectEcho>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckRecord {
    pub id: String,
    pub suite: String,
    pub subject: String,
    pub k: i64,
    pub seed: u64,
    pub statement: String,
    pub status: String,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Wall time, only with `--timing` so that default reports are byte-stable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl Report {
    /// 0 when no check failed, 1 otherwise. Skipped checks do not fail a run.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed == 0 {
            0
        } else {
            1
        }
    }
}

pub fn to_json(rep: &Report) -> String {
    let mut s = serde_json::to_string_pretty(rep).expect("report serializes");
    s.push('\n');
    s
}

pub fn to_text(rep: &Report) -> String {
    let mut out = String::new();
    let env = &rep.environment;
    out.push_str(&format!("scenario: {}\n", rep.scenario.name.as_deref().unwrap_or("(unnamed)")));
    let seeds: Vec<String> = env.seeds.iter().map(|s| s.to_string()).collect();
    out.push_str(&format!(
        "orders: k={} K={}  seeds: {}  samples: {}\n",
        env.orders.k,
        env.orders.k_max,
        if seeds.is_empty() { "-".to_string() } else { seeds.join(",") },
        env.samples
    ));
    for s in &env.subjects {
        out.push_str(&format!("subject {} ({}, m={}, r={})\n", s.name, s.kind, s.m, s.r));
    }
    let w = rep.checks.iter().map(|c| c.id.chars().count()).max().unwrap_or(0).max(2);
    out.push_str(&format!("\n{:<7} {:<w$} {:>6}  {}\n", "status", "id", "cases", "detail"));
    for c in &rep.checks {
        let mut detail = c.witness.clone().unwrap_or_default();
        if let Some(ms) = c.millis {
            detail = format!("{ms}ms {detail}");
        }
        out.push_str(&format!("{:<7} {:<w$} {:>6}  {}\n", c.status, c.id, c.cases, detail).trim_end().to_string());
        out.push('\n');
        for n in &c.notes {
            out.push_str(&format!("{:<7} {:<w$} {:>6}  note: {n}\n", "", "", ""));
        }
    }
    let s = &rep.summary;
    out.push_str(&format!("\n{} checks: {} passed, {} failed, {} skipped\n", s.total, s.passed, s.failed, s.skipped));
    out
}
