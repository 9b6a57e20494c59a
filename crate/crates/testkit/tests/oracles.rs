use wmp_core::arena::Arena;
use wmp_core::fixtures;
use wmp_core::model::{ObjectiveKind, ObjectiveSpec, Rational};
use wmp_core::window1d::{direct_fwmp, fwmp};
use wmp_testkit::{
    oracle_classical, oracle_classical_p2, oracle_window, oracle_window_p2, OracleBudget,
    TinyFamily,
};

fn zero() -> Rational {
    Rational::from_integer(0)
}

#[test]
fn fixed_window_examples() {
    let b = OracleBudget::default();
    let g = fixtures::fix3();
    assert!(oracle_window(&g, &ObjectiveSpec::fix(3), &b)
        .unwrap()
        .is_empty());
    let g = fixtures::fix6();
    let w = oracle_window(&g, &ObjectiveSpec::dir_fix(1), &b).unwrap();
    assert_eq!(g.format_set(&w), "b");
    let w = oracle_window(&g, &ObjectiveSpec::fix(1), &b).unwrap();
    assert_eq!(g.format_set(&w), "a b");
}

#[test]
fn two_dimensional_gadget_is_lost() {
    let b = OracleBudget::default();
    let g = fixtures::fix5();
    for l in 1..=4 {
        assert!(oracle_window(&g, &ObjectiveSpec::fix(l), &b)
            .unwrap()
            .is_empty());
        assert!(oracle_window_p2(&g, &ObjectiveSpec::fix(l), &b)
            .unwrap()
            .is_full());
    }
}

#[test]
fn classical_examples() {
    let b = OracleBudget::default();
    let g = fixtures::fix3();
    assert!(oracle_classical(&g, ObjectiveKind::MeanInf, zero(), &b)
        .unwrap()
        .is_full());
    let g = fixtures::fix2();
    assert!(oracle_classical(&g, ObjectiveKind::TotalSup, zero(), &b)
        .unwrap()
        .is_empty());
    let g = fixtures::fix4();
    assert!(oracle_classical(&g, ObjectiveKind::MeanSup, zero(), &b)
        .unwrap()
        .is_full());
    // the cycle through a1..a5 has mean 4/6, the best of the three
    let best = Rational::new(2, 3);
    assert!(oracle_classical(&g, ObjectiveKind::MeanInf, best, &b)
        .unwrap()
        .is_full());
    let above = Rational::new(3, 4);
    assert!(oracle_classical(&g, ObjectiveKind::MeanInf, above, &b)
        .unwrap()
        .is_empty());
}

#[test]
fn both_views_partition_the_fixtures() {
    let b = OracleBudget::default();
    for (name, g) in fixtures::all() {
        for spec in [
            ObjectiveSpec::good_window(2),
            ObjectiveSpec::dir_fix(3),
            ObjectiveSpec::fix(3),
        ] {
            let p1 = oracle_window(&g, &spec, &b).unwrap();
            let p2 = oracle_window_p2(&g, &spec, &b).unwrap();
            assert_eq!(p1.complement(), p2, "{name} {}", spec.kind);
        }
        if g.dims() == 1 {
            let p1 = oracle_classical(&g, ObjectiveKind::TotalSup, zero(), &b).unwrap();
            let p2 = oracle_classical_p2(&g, ObjectiveKind::TotalSup, zero(), &b).unwrap();
            assert_eq!(p1.complement(), p2, "{name}");
        }
    }
}

#[test]
fn a_wrong_solver_is_caught() {
    // direct fixed window in place of fixed window, as if co-Büchi were
    // solved as safety
    let b = OracleBudget::default();
    let caught = TinyFamily::default()
        .games()
        .iter()
        .filter(|g| g.num_states() <= 2)
        .any(|g| {
            let o = oracle_window(g, &ObjectiveSpec::fix(2), &b).unwrap();
            o == fwmp(g, 2).unwrap() && o != direct_fwmp(g, 2).unwrap()
        });
    assert!(caught);
}
