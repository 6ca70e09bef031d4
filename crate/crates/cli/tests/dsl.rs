use std::path::PathBuf;
use std::process::Command;

use exact_core::{parse::parse_poly, q, MPoly};
use proptest::prelude::*;
use spencer_cli::ast::*;
use spencer_cli::*;

fn parse(src: &str) -> Scenario {
    parse_scenario(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

fn here(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn demo() -> String {
    std::fs::read_to_string(here("demo/demo.scn")).unwrap()
}

#[test]
fn minimal_scenario() {
    let sc = parse("model P = pair(m=1)\nseed 3\ncheck groupoid.axioms on P\n");
    assert_eq!(sc.decls.len(), 1);
    assert_eq!(sc.decls[0].kind, DeclKind::Model(ModelCtor::Pair { m: 1 }));
    assert_eq!(sc.seeds, vec![3]);
    assert_eq!(sc.orders(), 1..=1);
    assert_eq!(sc.checks[0].suite, "groupoid.axioms");
}

#[test]
fn polynomial_literal() {
    let sc = parse("model P = pair(m=2)\nsection s on P = [3/4*x1^2 - x2, 0]\n");
    let DeclKind::Section { def: SecDef::Literal(v), .. } = &sc.decls[1].kind else { panic!() };
    let x1 = MPoly::var(2, 0);
    let want = x1.mul(&x1).scale(&exact_core::qf(3, 4)).sub(&MPoly::var(2, 1));
    assert_eq!(v[0], want);
    assert_eq!(v[1], MPoly::zero(2));
    assert_eq!(v[0].to_string_with(&base_names(2)), "3/4*x1^2 - x2");
}

#[test]
fn undeclared_model_is_a_resolve_error() {
    let err = parse_scenario("model P = pair(m=1)\nalgebroid A = from_model(Q)\n").unwrap_err();
    match err {
        DslError::Resolve { line, col, msg } => {
            assert_eq!((line, col), (2, 26));
            assert!(msg.contains("`Q`"), "{msg}");
        }
        e => panic!("expected resolve error, got {e}"),
    }
}

#[test]
fn errors_carry_positions() {
    let cases: &[(&str, bool, usize, usize)] = &[
        ("model P = pair(m=1\n", false, 2, 1),
        ("model P = pair(m=1)\nsection s on P = [x1 +]\n", false, 2, 23),
        ("model P = pair(m=1)\nsection s on P = [x1, x1]\n", true, 2, 18),
        ("model P = pair(m=1)\nsection s on P = [y]\n", false, 2, 19),
        ("model P = blob(m=1)\n", false, 1, 11),
        ("order k = 3\norder K = 2\n", true, 2, 1),
        ("order k = 5\n", true, 1, 11),
        ("model P = pair(m=7)\n", true, 1, 18),
        ("model P = pair(m=1)\ncheck linear.spencer on P\n", true, 2, 1),
        ("model P = pair(m=1)\nseed 1\ncheck no.such on P\n", true, 3, 7),
        ("algebroid A = tangent(m=1)\nseed 1\ncheck mc.first on A\n", true, 3, 19),
        ("model P = pair(m=1)\nmodel P = pair(m=2)\n", true, 2, 7),
        ("algebroid B = explicit(m=1, r=2, anchor=[[0, 0]], bracket=[(2,1)=[0, 0]])\n", true, 1, 60),
    ];
    for &(src, resolve, line, col) in cases {
        let e = parse_scenario(src).unwrap_err();
        let got = match &e {
            DslError::Resolve { line, col, .. } => (true, *line, *col),
            DslError::Syntax { line, col, .. } => (false, *line, *col),
        };
        assert_eq!(got, (resolve, line, col), "{src:?}: {e}");
    }
}

#[test]
fn comments_and_layout() {
    let a = parse("# head\nmodel P = pair(m=1) # trailing\n\n  seed 1 , 2\ncheck groupoid.axioms on P");
    let b = parse("model P=pair( m = 1 )\nseeds 1,2\ncheck groupoid.axioms on P\n");
    assert_eq!(a, b);
}

#[test]
fn print_then_parse_is_identity_on_demo() {
    let sc = parse(&demo());
    let printed = print_scenario(&sc);
    assert_eq!(parse(&printed), sc);
    assert_eq!(print_scenario(&parse(&printed)), printed);
}

#[test]
fn spencer_on_pair1_up_to_order_3() {
    let sc = parse("model P = pair(m=1)\nsection s on P = [x1^3 - 2*x1]\norder k = 1\norder K = 3\nseed 5\ncheck linear.spencer on P\ncheck linear.spencer on s\n");
    let rep = run_scenario(&sc, &RunOptions::default());
    assert_eq!(rep.summary.total, 6);
    assert_eq!(rep.summary.passed, 6, "{}", to_text(&rep));
    assert_eq!(rep.exit_code(), 0);
}

const BROKEN: &str = "algebroid B = explicit(m=1, r=3, anchor=[[0, 0, 0]], bracket=[(1,2)=[0, 0, 1], (1,3)=[1, 0, 0]])\nseed 1\ncheck algebroid.axioms on B\n";

#[test]
fn broken_jacobi_fails_with_witness() {
    let rep = run_scenario(&parse(BROKEN), &RunOptions::default());
    assert_eq!(rep.summary.failed, 1);
    assert_eq!(rep.exit_code(), 1);
    let c = &rep.checks[0];
    assert_eq!(c.status, "fail");
    let w = c.witness.as_deref().unwrap();
    assert!(w.contains("Jacobi") && w.contains("term"), "{w}");
}

#[test]
fn empty_check_list() {
    let sc = parse("scenario \"nothing\"\nmodel P = pair(m=1)\n");
    let rep = run_scenario(&sc, &RunOptions::default());
    assert!(rep.checks.is_empty());
    assert_eq!(rep.summary.total, 0);
    assert_eq!(rep.exit_code(), 0);
    let text = to_text(&rep);
    assert!(text.contains("status") && text.contains("0 checks"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("pass") || l.starts_with("fail")).count(), 0);
    let json: serde_json::Value = serde_json::from_str(&to_json(&rep)).unwrap();
    assert_eq!(json["checks"].as_array().unwrap().len(), 0);
}

#[test]
fn non_action_is_reported_not_panicking() {
    // x·h is not an action: the unit does not act trivially
    let sc = parse("model A = action(m=1, group=abelian(1), act=[x1*h1])\nalgebroid E = from_model(A)\nseed 1\ncheck algebroid.axioms on E\ncheck groupoid.axioms on A\n");
    let rep = run_scenario(&sc, &RunOptions::default());
    assert_eq!(rep.summary.total, 2);
    assert_eq!(rep.checks[1].status, "fail", "{}", to_text(&rep));
    assert!(rep.checks[1].witness.is_some());
}

#[test]
fn json_key_order() {
    let rep = run_scenario(&parse(BROKEN), &RunOptions::default());
    let s = to_json(&rep);
    let pos = |k: &str| s.find(&format!("\"{k}\"")).unwrap_or_else(|| panic!("missing {k}"));
    assert!(pos("scenario") < pos("environment"));
    assert!(pos("environment") < pos("checks"));
    assert!(pos("checks") < pos("summary"));
    for k in ["id", "suite", "subject", "k", "seed", "statement", "status", "cases", "witness"] {
        assert!(s.contains(&format!("\"{k}\"")), "{k}");
    }
    assert!(pos("orders") < pos("seeds"));
}

#[test]
fn reports_are_byte_stable() {
    let sc = parse(&demo());
    let a = to_json(&run_scenario(&sc, &RunOptions::default()));
    let b = to_json(&run_scenario(&sc, &RunOptions::default()));
    assert_eq!(a, b);
}

fn golden(name: &str, got: &str) {
    let path = here(&format!("tests/golden/{name}"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, got).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {path:?}; rerun with UPDATE_GOLDEN=1"));
    assert_eq!(got, want, "report differs from {name}");
}

#[test]
fn demo_golden() {
    let rep = run_scenario(&parse(&demo()), &RunOptions::default());
    assert_eq!(rep.exit_code(), 0, "{}", to_text(&rep));
    golden("demo.json", &to_json(&rep));
    golden("demo.txt", &to_text(&rep));
}

#[test]
fn every_listed_check_runs_alone() {
    let sc = parse(&demo());
    let all = plan(&sc, &RunOptions::default());
    let full = run_scenario(&sc, &RunOptions::default());
    assert_eq!(all.len(), full.checks.len());
    for (p, rec) in all.iter().zip(&full.checks) {
        let opts = RunOptions { suite: Some(p.id.clone()), ..Default::default() };
        let one = run_scenario(&sc, &opts);
        assert_eq!(one.checks.len(), 1, "{}", p.id);
        assert_eq!(&one.checks[0], rec, "{}", p.id);
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spencer"))
}

#[test]
fn cli_exit_codes() {
    let dir = std::env::temp_dir().join(format!("spencer-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let broken = dir.join("broken.scn");
    std::fs::write(&broken, BROKEN).unwrap();
    let bad = dir.join("bad.scn");
    std::fs::write(&bad, "model P = pair(m=1)\nalgebroid A = from_model(Q)\n").unwrap();

    let demo = here("demo/demo.scn");
    let out = bin().arg("check").arg(&demo).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let golden = std::fs::read_to_string(here("tests/golden/demo.txt")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);

    let out = bin().arg("check").arg(&broken).args(["--format", "json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"status\": \"fail\""));

    let out = bin().arg("check").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("resolve error"));

    assert_eq!(bin().arg("check").arg(&demo).args(["--k", "9"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().arg("bogus").output().unwrap().status.code(), Some(2));

    let out = bin().arg("check").arg(&demo).arg("--list-checks").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let ids = String::from_utf8(out.stdout).unwrap();
    let first = ids.lines().next().unwrap();
    let out = bin().arg("check").arg(&demo).args(["--suite", first, "--format", "json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["checks"][0]["id"], first);
    assert_eq!(v["summary"]["total"], 1);

    let out = bin().args(["ranks", "--m", "2", "--r", "1", "--k", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    // homology column is all zeros
    assert!(text.lines().skip(1).all(|l| l.trim_end().ends_with(" 0")), "{text}");
    std::fs::remove_dir_all(&dir).ok();
}

/// Scenario text built from a seed: random models, polynomial sections and checks.
fn random_scenario(seed: u64) -> String {
    use spencer_core::random::{below, poly, rng};
    let mut g = rng(seed);
    let mut s = String::new();
    if below(&mut g, 2) == 0 {
        s.push_str(&format!("scenario \"s{seed}\"\n"));
    }
    let m = 1 + below(&mut g, 2);
    let names = base_names(m);
    let p = |g: &mut _, arity: usize, names: &[String]| poly(g, arity, 2, 3).to_string_with(names);
    let model = match below(&mut g, 5) {
        0 => format!("pair(m={m})"),
        1 => format!("groupbundle(m={m}, group=abelian({}))", 1 + below(&mut g, 2)),
        2 => format!("gauge(m={m}, group=heisenberg)"),
        3 => {
            let an = action_names(m, 1);
            let act: Vec<String> = (0..m).map(|_| p(&mut g, m + 1, &an)).collect();
            format!("action(m={m}, group=abelian(1), act=[{}])", act.join(", "))
        }
        _ => "unipotent()".into(),
    };
    let m = if model == "unipotent()" { 2 } else { m };
    let names = if m == names.len() { names } else { base_names(m) };
    s.push_str(&format!("model M = {model}\n"));
    let r = 1 + below(&mut g, 3);
    let anchor: Vec<String> = (0..m)
        .map(|_| format!("[{}]", (0..r).map(|_| p(&mut g, m, &names)).collect::<Vec<_>>().join(", ")))
        .collect();
    let mut br = Vec::new();
    for l in 1..=r {
        for q in l + 1..=r {
            if below(&mut g, 2) == 0 {
                let v: Vec<String> = (0..r).map(|_| p(&mut g, m, &names)).collect();
                br.push(format!("({l},{q}) = [{}]", v.join(",")));
            }
        }
    }
    s.push_str(&format!("algebroid E = explicit(m={m}, r={r}, anchor=[{}], bracket=[{}])\n", anchor.join(","), br.join(", ")));
    let xi: Vec<String> = (0..r).map(|_| p(&mut g, m, &names)).collect();
    s.push_str(&format!("section s on E = [{}]\n", xi.join(", ")));
    s.push_str(&format!("section t on E = random(seed={}, degree={})\n", below(&mut g, 100), below(&mut g, 3)));
    s.push_str(&format!("bisection b on M = random(seed={}, degree=1)\n", below(&mut g, 100)));
    let k = below(&mut g, 3);
    s.push_str(&format!("order k = {k}\norder K = {}\n", k + below(&mut g, 2)));
    s.push_str(&format!("seed {}, {}\nsamples {}\n", below(&mut g, 1000), below(&mut g, 1000), 1 + below(&mut g, 9)));
    s.push_str("check linear.spencer on s\ncheck brackets.second on E\ncheck holonomic.first on b\n");
    if below(&mut g, 2) == 0 {
        s.push_str("output format=json\n");
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_print_parse_is_idempotent(seed in any::<u64>()) {
        let src = random_scenario(seed);
        let a = parse(&src);
        let printed = print_scenario(&a);
        let b = parse(&printed);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(print_scenario(&b), printed);
    }

    #[test]
    fn literals_round_trip_through_the_parser(seed in any::<u64>()) {
        let mut g = spencer_core::random::rng(seed);
        let f = spencer_core::random::poly(&mut g, 2, 3, 4);
        let text = f.to_string_with(&base_names(2));
        prop_assert_eq!(parse_poly(&text, &base_names(2)).unwrap(), f.clone());
        let sc = parse(&format!("model P = pair(m=2)\nsection s on P = [{text}, 1]\n"));
        let DeclKind::Section { def: SecDef::Literal(v), .. } = &sc.decls[1].kind else { panic!() };
        prop_assert_eq!(&v[0], &f);
        prop_assert_eq!(&v[1], &MPoly::constant(2, q(1)));
    }
}
