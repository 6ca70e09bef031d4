//! Recursive-descent parser for scenario files.
//!
//! ```text
//! scenario   := stmt*
//! stmt       := 'scenario' STRING
//!             | 'model' NAME '=' model
//!             | 'algebroid' NAME '=' algebroid
//!             | 'section' NAME 'on' NAME '=' values
//!             | 'bisection' NAME 'on' NAME '=' values
//!             | 'order' ('k' | 'K') '=' INT
//!             | 'seed' INT (',' INT)*
//!             | 'samples' INT
//!             | 'check' SUITE 'on' NAME
//!             | 'output' 'format' '=' ('text' | 'json')
//! model      := 'pair' '(' 'm' '=' INT ')'
//!             | ('groupbundle' | 'gauge') '(' 'm' '=' INT ',' 'group' '=' group ')'
//!             | 'action' '(' 'm' '=' INT ',' 'group' '=' group ',' 'act' '=' polys ')'
//!             | 'unipotent' '(' ')'
//! group      := 'abelian' '(' INT ')' | 'heisenberg'
//! algebroid  := 'from_model' '(' NAME ')' | 'tangent' '(' 'm' '=' INT ')'
//!             | 'sl2line' '(' ')' | 'so3' '(' 'm' '=' INT ')'
//!             | 'explicit' '(' 'm' '=' INT ',' 'r' '=' INT ','
//!                   'anchor' '=' '[' polys (',' polys)* ']' ','
//!                   'bracket' '=' '[' (pair '=' polys (',' pair '=' polys)*)? ']' ')'
//! pair       := '(' INT ',' INT ')'
//! values     := polys | 'random' '(' 'seed' '=' INT ',' 'degree' '=' INT ')'
//! polys      := '[' POLY (',' POLY)* ']'
//! ```
//! `#` starts a comment. Names must be declared before use.

use crate::ast::*;
use exact_core::{parse::parse_poly_at, ExactError, MPoly};
use spencer_core::checks;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: resolve error: {msg}")]
    Resolve { line: usize, col: usize, msg: String },
}

type Result<T> = std::result::Result<T, DslError>;

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

pub fn parse_scenario(src: &str) -> Result<Scenario> {
    let mut p = Parser { src, pos: 0 };
    let mut sc = Scenario::default();
    loop {
        p.ws();
        if p.pos >= src.len() {
            break;
        }
        p.statement(&mut sc)?;
    }
    if let (None, Some(kk)) = (sc.k, sc.k_max) {
        if kk < 1 {
            return Err(DslError::Resolve { line: 1, col: 1, msg: format!("order K = {kk} is below the default k = 1") });
        }
    }
    if !sc.checks.is_empty() && sc.seeds.is_empty() {
        let c = sc.checks[0].span;
        return Err(DslError::Resolve { line: c.line, col: c.col, msg: "checks need a `seed` statement".into() });
    }
    Ok(sc)
}

fn span_of(src: &str, pos: usize) -> Span {
    let before = &src[..pos.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    Span { line, col }
}

impl<'a> Parser<'a> {
    /// Position of the next token.
    fn span(&mut self) -> Span {
        self.ws();
        span_of(self.src, self.pos)
    }

    fn syntax<T>(&mut self, msg: impl Into<String>) -> Result<T> {
        let s = self.span();
        Err(DslError::Syntax { line: s.line, col: s.col, msg: msg.into() })
    }

    fn resolve<T>(&self, at: Span, msg: impl Into<String>) -> Result<T> {
        Err(DslError::Resolve { line: at.line, col: at.col, msg: msg.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn ws(&mut self) {
        loop {
            let r = self.rest();
            let t = r.trim_start();
            self.pos += r.len() - t.len();
            if t.starts_with('#') {
                self.pos += t.find('\n').unwrap_or(t.len());
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let got = self.peek().map(|g| format!("`{g}`")).unwrap_or_else(|| "end of input".into());
            self.syntax(format!("expected `{c}`, found {got}"))
        }
    }

    /// Identifier or dotted suite name.
    fn word(&mut self) -> Result<String> {
        self.ws();
        let r = self.rest();
        let n = r.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '.')).unwrap_or(r.len());
        if n == 0 || !r.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
            return self.syntax("expected a name");
        }
        self.pos += n;
        Ok(r[..n].to_string())
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        self.ws();
        let at = self.pos;
        match self.word() {
            Ok(w) if w == kw => Ok(()),
            _ => {
                self.pos = at;
                self.syntax(format!("expected `{kw}`"))
            }
        }
    }

    fn int(&mut self) -> Result<u64> {
        self.ws();
        let r = self.rest();
        let n = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
        if n == 0 {
            return self.syntax("expected an integer");
        }
        let v = r[..n].parse::<u64>();
        match v {
            Ok(v) => {
                self.pos += n;
                Ok(v)
            }
            Err(_) => self.syntax("integer out of range"),
        }
    }

    /// Integer within documented bounds; out of range is a resolve error.
    fn small(&mut self, lo: u64, hi: u64, what: &str) -> Result<u64> {
        self.ws();
        let at = self.span();
        let v = self.int()?;
        if v < lo || v > hi {
            return Err(DslError::Resolve { line: at.line, col: at.col, msg: format!("{what} must be in {lo}..={hi}") });
        }
        Ok(v)
    }

    fn kwarg_int(&mut self, key: &str, lo: u64, hi: u64) -> Result<u64> {
        self.keyword(key)?;
        self.expect('=')?;
        self.small(lo, hi, key)
    }

    fn string(&mut self) -> Result<String> {
        self.expect('"')?;
        let r = self.rest();
        match r.find(['"', '\n']) {
            Some(n) if r[n..].starts_with('"') => {
                self.pos += n + 1;
                Ok(r[..n].to_string())
            }
            _ => self.syntax("unterminated string"),
        }
    }

    fn poly(&mut self, names: &[String]) -> Result<MPoly> {
        self.ws();
        let start = self.pos;
        let mut depth = 0usize;
        for (i, c) in self.rest().char_indices() {
            match c {
                '(' => depth += 1,
                ')' if depth > 0 => depth -= 1,
                ')' | ',' | ']' | '\n' | '#' if depth == 0 => {
                    self.pos = start + i;
                    break;
                }
                _ => {}
            }
            self.pos = start + i + c.len_utf8();
        }
        let text = &self.src[start..self.pos];
        let text = text.trim_end();
        if text.is_empty() {
            return self.syntax("expected a polynomial");
        }
        parse_poly_at(text, names, start).map_err(|e| match e {
            ExactError::Syntax { offset, msg } => {
                let s = span_of(self.src, offset);
                DslError::Syntax { line: s.line, col: s.col, msg }
            }
            other => DslError::Syntax { line: span_of(self.src, start).line, col: span_of(self.src, start).col, msg: other.to_string() },
        })
    }

    fn polys(&mut self, names: &[String], len: usize, what: &str) -> Result<Vec<MPoly>> {
        let at = self.span();
        self.expect('[')?;
        let mut out = vec![self.poly(names)?];
        while self.eat(',') {
            out.push(self.poly(names)?);
        }
        self.expect(']')?;
        if out.len() != len {
            return self.resolve(at, format!("{what} needs {len} entries, found {}", out.len()));
        }
        Ok(out)
    }

    fn group(&mut self) -> Result<GroupSpec> {
        self.ws();
        let at = self.pos;
        match self.word()?.as_str() {
            "abelian" => {
                self.expect('(')?;
                let q = self.small(1, 4, "group dimension")? as usize;
                self.expect(')')?;
                Ok(GroupSpec::Abelian(q))
            }
            "heisenberg" => Ok(GroupSpec::Heisenberg),
            w => {
                self.pos = at;
                self.syntax(format!("unknown group `{w}`"))
            }
        }
    }

    fn lookup(&self, sc: &Scenario, name: &str, at: Span, want: &[&str]) -> Result<Decl> {
        let Some(d) = sc.decl(name) else {
            let what = if want.len() > 2 { "subject".to_string() } else { want.join(" or ") };
            return self.resolve(at, format!("undeclared {what} `{name}`"));
        };
        let kind = d.kind_name();
        if !want.contains(&kind) {
            return self.resolve(at, format!("`{name}` is a {kind}, expected {}", want.join(" or ")));
        }
        Ok(d.clone())
    }

    fn model(&mut self) -> Result<ModelCtor> {
        self.ws();
        let at = self.pos;
        let ctor = self.word()?;
        self.expect('(')?;
        let out = match ctor.as_str() {
            "pair" => ModelCtor::Pair { m: self.kwarg_int("m", 1, 3)? as usize },
            "groupbundle" | "gauge" => {
                let m = self.kwarg_int("m", 1, 3)? as usize;
                self.expect(',')?;
                self.keyword("group")?;
                self.expect('=')?;
                let group = self.group()?;
                if ctor == "gauge" {
                    ModelCtor::Gauge { m, group }
                } else {
                    ModelCtor::GroupBundle { m, group }
                }
            }
            "action" => {
                let m = self.kwarg_int("m", 1, 3)? as usize;
                self.expect(',')?;
                self.keyword("group")?;
                self.expect('=')?;
                let group = self.group()?;
                self.expect(',')?;
                self.keyword("act")?;
                self.expect('=')?;
                let act = self.polys(&action_names(m, group.dim()), m, "act")?;
                ModelCtor::Action { m, group, act }
            }
            "unipotent" => ModelCtor::Unipotent,
            w => {
                self.pos = at;
                return self.syntax(format!("unknown model constructor `{w}`"));
            }
        };
        self.expect(')')?;
        Ok(out)
    }

    fn algebroid(&mut self, sc: &Scenario) -> Result<(AlgDef, usize, usize)> {
        self.ws();
        let at = self.pos;
        let ctor = self.word()?;
        self.expect('(')?;
        let out = match ctor.as_str() {
            "from_model" => {
                let s = self.span();
                let name = self.word()?;
                let d = self.lookup(sc, &name, s, &["model"])?;
                (AlgDef::FromModel(name), d.m, d.r)
            }
            "tangent" => {
                let m = self.kwarg_int("m", 1, 3)? as usize;
                (AlgDef::Tangent { m }, m, m)
            }
            "so3" => {
                let m = self.kwarg_int("m", 1, 3)? as usize;
                (AlgDef::So3 { m }, m, 3)
            }
            "sl2line" => (AlgDef::Sl2Line, 1, 3),
            "explicit" => {
                let m = self.kwarg_int("m", 1, 3)? as usize;
                self.expect(',')?;
                let r = self.kwarg_int("r", 1, 4)? as usize;
                self.expect(',')?;
                let names = base_names(m);
                self.keyword("anchor")?;
                self.expect('=')?;
                let s = self.span();
                self.expect('[')?;
                let mut anchor = vec![self.polys(&names, r, "anchor row")?];
                while self.eat(',') {
                    anchor.push(self.polys(&names, r, "anchor row")?);
                }
                self.expect(']')?;
                if anchor.len() != m {
                    return self.resolve(s, format!("anchor needs {m} rows, found {}", anchor.len()));
                }
                self.expect(',')?;
                self.keyword("bracket")?;
                self.expect('=')?;
                self.expect('[')?;
                let mut bracket: Vec<(usize, usize, Vec<MPoly>)> = Vec::new();
                if self.peek() != Some(']') {
                    loop {
                        let s = self.span();
                        self.expect('(')?;
                        let l = self.small(1, r as u64, "basis index")? as usize;
                        self.expect(',')?;
                        let p = self.small(1, r as u64, "basis index")? as usize;
                        self.expect(')')?;
                        if l >= p {
                            return self.resolve(s, "bracket entries are listed as (l,p) with l < p");
                        }
                        if bracket.iter().any(|(a, b, _)| (*a, *b) == (l, p)) {
                            return self.resolve(s, format!("bracket ({l},{p}) given twice"));
                        }
                        self.expect('=')?;
                        bracket.push((l, p, self.polys(&names, r, "bracket value")?));
                        if !self.eat(',') {
                            break;
                        }
                    }
                }
                self.expect(']')?;
                (AlgDef::Explicit { m, r, anchor, bracket }, m, r)
            }
            w => {
                self.pos = at;
                return self.syntax(format!("unknown algebroid constructor `{w}`"));
            }
        };
        self.expect(')')?;
        Ok(out)
    }

    fn values(&mut self, m: usize, len: usize) -> Result<SecDef> {
        if self.peek() == Some('[') {
            return Ok(SecDef::Literal(self.polys(&base_names(m), len, "value list")?));
        }
        self.keyword("random")?;
        self.expect('(')?;
        let seed = self.kwarg_int("seed", 0, u64::MAX)?;
        self.expect(',')?;
        let degree = self.kwarg_int("degree", 0, 4)? as i64;
        self.expect(')')?;
        Ok(SecDef::Random { seed, degree })
    }

    fn fresh(&self, sc: &Scenario, name: &str, at: Span) -> Result<()> {
        if sc.decl(name).is_some() {
            return self.resolve(at, format!("`{name}` is already declared"));
        }
        Ok(())
    }

    fn statement(&mut self, sc: &mut Scenario) -> Result<()> {
        let span = self.span();
        let kw = self.word()?;
        match kw.as_str() {
            "scenario" => sc.name = Some(self.string()?),
            "model" => {
                let s = self.span();
                let name = self.word()?;
                self.fresh(sc, &name, s)?;
                self.expect('=')?;
                let ctor = self.model()?;
                let (m, r) = ctor.dims();
                sc.decls.push(Decl { name, kind: DeclKind::Model(ctor), m, r, span });
            }
            "algebroid" => {
                let s = self.span();
                let name = self.word()?;
                self.fresh(sc, &name, s)?;
                self.expect('=')?;
                let (def, m, r) = self.algebroid(sc)?;
                sc.decls.push(Decl { name, kind: DeclKind::Algebroid(def), m, r, span });
            }
            "section" | "bisection" => {
                let s = self.span();
                let name = self.word()?;
                self.fresh(sc, &name, s)?;
                self.keyword("on")?;
                let s = self.span();
                let on = self.word()?;
                let want: &[&str] = if kw == "section" { &["algebroid", "model"] } else { &["model"] };
                let d = self.lookup(sc, &on, s, want)?;
                self.expect('=')?;
                let def = self.values(d.m, d.r)?;
                let kind = if kw == "section" { DeclKind::Section { on, def } } else { DeclKind::Bisection { on, def } };
                sc.decls.push(Decl { name, kind, m: d.m, r: d.r, span });
            }
            "order" => {
                let which = self.word()?;
                self.expect('=')?;
                let v = self.small(0, MAX_ORDER as u64, "order")? as i64;
                match which.as_str() {
                    "k" => sc.k = Some(v),
                    "K" => sc.k_max = Some(v),
                    _ => return self.resolve(span, format!("unknown order `{which}`, expected `k` or `K`")),
                }
                if let (Some(k), Some(kk)) = (sc.k, sc.k_max) {
                    if kk < k {
                        return self.resolve(span, format!("order K = {kk} is below k = {k}"));
                    }
                }
            }
            "seed" | "seeds" => {
                sc.seeds.push(self.int()?);
                while self.eat(',') {
                    sc.seeds.push(self.int()?);
                }
            }
            "samples" => sc.samples = Some(self.small(1, MAX_SAMPLES as u64, "samples")? as usize),
            "check" => {
                let s = self.span();
                let suite = self.word()?;
                let Some(info) = checks::suite(&suite) else {
                    return self.resolve(s, format!("unknown check suite `{suite}`"));
                };
                self.keyword("on")?;
                let s = self.span();
                let subject = self.word()?;
                let d = self.lookup(sc, &subject, s, &["model", "algebroid", "section", "bisection"])?;
                if let Err(why) = info.accepts(d.kind_name()) {
                    return self.resolve(s, why);
                }
                sc.checks.push(CheckDecl { suite, subject, span });
            }
            "output" => {
                self.keyword("format")?;
                self.expect('=')?;
                self.ws();
                let at = self.pos;
                sc.format = Some(match self.word()?.as_str() {
                    "text" => Format::Text,
                    "json" => Format::Json,
                    w => {
                        self.pos = at;
                        return self.syntax(format!("unknown format `{w}`"));
                    }
                });
            }
            w => {
                self.pos -= w.len();
                return self.syntax(format!("unknown statement `{w}`"));
            }
        }
        Ok(())
    }
}
