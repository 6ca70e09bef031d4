//! Identities as properties over random seeds. Each case runs a seeded check
//! with a handful of samples, so a failing seed is reproducible by id.

use std::sync::Arc;

use exact_core::MPoly;
use proptest::prelude::*;
use spencer_core::checks::{run_check, Status, Subject};
use spencer_core::groupoid::{Group, GroupoidModel};
use spencer_core::jet::delta_sequence_report;
use spencer_core::AlgebroidChart;

fn algebroids() -> Vec<(&'static str, Subject)> {
    vec![
        ("tangent2", Subject::Algebroid(Arc::new(AlgebroidChart::tangent(2)))),
        ("abelian21", Subject::Algebroid(Arc::new(AlgebroidChart::abelian(2, 1)))),
        ("sl2line", Subject::Algebroid(Arc::new(AlgebroidChart::sl2_line()))),
        ("so3", Subject::Algebroid(Arc::new(AlgebroidChart::so3_bundle(1)))),
        ("heis1", Subject::Model(Arc::new(GroupoidModel::group_bundle(1, Group::heisenberg())))),
    ]
}

fn models() -> Vec<(&'static str, Subject)> {
    vec![
        ("pair1", Subject::Model(Arc::new(GroupoidModel::pair(1)))),
        ("pair2", Subject::Model(Arc::new(GroupoidModel::pair(2)))),
        ("gauge1", Subject::Model(Arc::new(GroupoidModel::gauge(1, Group::abelian(1))))),
        ("heis1", Subject::Model(Arc::new(GroupoidModel::group_bundle(1, Group::heisenberg())))),
        ("unipotent", Subject::Model(Arc::new(GroupoidModel::unipotent_action()))),
    ]
}

fn holds(suite: &str, subjects: &[(&str, Subject)], pick: usize, k: i64, seed: u64, samples: usize) -> Result<(), TestCaseError> {
    let (label, subj) = &subjects[pick % subjects.len()];
    let o = run_check(suite, label, subj, k, seed, samples);
    prop_assert_eq!(o.status, Status::Pass, "{}: {:?}", o.id, o.witness);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spencer_operator_kills_prolongations(seed in any::<u64>(), pick in 0usize..5, k in 1i64..=3) {
        holds("linear.spencer", &algebroids(), pick, k, seed, 2)?;
    }

    #[test]
    fn jet_bracket_is_leibniz_and_prolongs(seed in any::<u64>(), pick in 0usize..5, k in 0i64..=2) {
        holds("brackets.zero", &algebroids(), pick, k, seed, 2)?;
    }

    #[test]
    fn first_bracket_axioms(seed in any::<u64>(), pick in 0usize..5) {
        holds("brackets.first", &algebroids(), pick, 2, seed, 2)?;
    }

    #[test]
    fn second_and_third_brackets(seed in any::<u64>(), pick in 0usize..5, k in 1i64..=2) {
        holds("brackets.second", &algebroids(), pick, k, seed, 2)?;
        holds("brackets.third", &algebroids(), pick, k, seed, 2)?;
    }

    #[test]
    fn groupoid_models_are_consistent(seed in any::<u64>(), pick in 0usize..5) {
        holds("groupoid.axioms", &models(), pick, 0, seed, 3)?;
        holds("groupoid.extract", &models(), pick, 0, seed, 3)?;
    }

    #[test]
    fn nonlinear_operators_vanish_on_holonomic_fields(seed in any::<u64>(), pick in 0usize..5, k in 0i64..=2) {
        holds("holonomic.first", &models(), pick, k, seed, 2)?;
        holds("holonomic.second", &models(), pick, k, seed, 2)?;
    }

    #[test]
    fn composition_rules(seed in any::<u64>(), pick in 0usize..5, k in 0i64..=1) {
        holds("compose.first", &models(), pick, k, seed, 2)?;
        holds("compose.second", &models(), pick, k, seed, 2)?;
    }

    #[test]
    fn linearization_is_the_linear_operator(seed in any::<u64>(), pick in 0usize..5, k in 0i64..=2) {
        holds("linearize.first", &models(), pick, k, seed, 2)?;
        holds("linearize.second", &models(), pick, k, seed, 2)?;
    }

    #[test]
    fn curvature_of_nonlinear_operators(seed in any::<u64>(), pick in 0usize..5) {
        holds("mc.first", &models(), pick, 1, seed, 2)?;
        holds("mc.second", &models(), pick, 1, seed, 2)?;
    }

    #[test]
    fn image_solvers_round_trip(seed in any::<u64>(), pick in 0usize..5, k in 0i64..=1) {
        holds("image.first", &models(), pick, k, seed, 2)?;
        holds("image.second", &models(), pick, k, seed, 2)?;
    }

    #[test]
    fn quotient_operators(seed in any::<u64>(), pick in 0usize..5) {
        holds("soph.dhat", &algebroids(), pick, 1, seed, 2)?;
        holds("soph.partial", &models(), pick, 1, seed, 2)?;
    }

    #[test]
    fn delta_sequence_is_exact(m in 1usize..=3, r in 1usize..=2, k in 1i64..=4) {
        let rows = delta_sequence_report(m, r, k);
        let mut euler = 0i64;
        for row in &rows {
            prop_assert_eq!(row.homology, 0, "{:?}", row);
            prop_assert_eq!(row.rank_in + row.rank_out, row.dim);
            euler += if row.position % 2 == 0 { row.dim as i64 } else { -(row.dim as i64) };
        }
        prop_assert_eq!(euler, 0);
    }

    /// A random structure with nonzero constant brackets on an abelian
    /// anchor is a Lie algebroid only if the constants satisfy Jacobi;
    /// the check must agree with a direct Jacobi evaluation.
    #[test]
    fn axioms_check_detects_jacobi(a in -2i64..=2, b in -2i64..=2, c in -2i64..=2) {
        // [e1,e2] = a e3, [e1,e3] = b e1, [e2,e3] = c e2
        let k = |v: i64| MPoly::constant(1, exact_core::q(v));
        let z = || MPoly::zero(1);
        let mut cs = vec![vec![vec![z(); 3]; 3]; 3];
        let mut set = |n: usize, l: usize, p: usize, v: i64| {
            cs[n][l][p] = k(v);
            cs[n][p][l] = k(-v);
        };
        set(2, 0, 1, a);
        set(0, 0, 2, b);
        set(1, 1, 2, c);
        let alg = AlgebroidChart::new("t", 1, 3, vec![vec![z(), z(), z()]], cs);
        // Jacobi on (e1,e2,e3): [[e1,e2],e3] + [[e2,e3],e1] + [[e3,e1],e2]
        //   = a[e3,e3] + c[e2,e1] - b[e1,e2] = -(b + c) a e3
        let jacobi_ok = a * (b + c) == 0;
        let o = run_check("algebroid.axioms", "t", &Subject::Algebroid(Arc::new(alg)), 0, 0, 1);
        prop_assert_eq!(o.status == Status::Pass, jacobi_ok, "{:?}", o.witness);
        if !jacobi_ok {
            prop_assert!(o.witness.as_deref().unwrap_or("").contains("Jacobi"));
        }
    }
}
