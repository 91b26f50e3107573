use evframe_core::frame::{heyting_frame, validate_frame, FiniteFrame};
use evframe_core::heyting::{builtin_algebra, validate_algebra, Builtin, HeytingAlgebra};
use evframe_core::tripos::{check_adjunctions, check_beck_chevalley, check_generic_element, ufam_exists, ufam_forall, ufam_leq, ufam_reindex};
use proptest::prelude::*;

fn chain(n: usize) -> HeytingAlgebra {
    let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    let pairs: Vec<(String, String)> = (1..n).map(|i| (names[i - 1].clone(), names[i].clone())).collect();
    HeytingAlgebra::from_order(&names, &pairs).unwrap()
}

/// `2 × 2`, or a chain with a fresh bottom or top glued on.
fn algebras() -> Vec<HeytingAlgebra> {
    let mut out: Vec<HeytingAlgebra> = Builtin::ALL.into_iter().map(HeytingAlgebra::builtin).collect();
    out.extend((1..=5).map(chain));
    let names = ["0", "a", "b", "m", "1"];
    let pairs = [("0", "a"), ("0", "b"), ("a", "m"), ("b", "m"), ("m", "1")];
    out.push(HeytingAlgebra::from_order(&names, &pairs).unwrap());
    out
}

proptest! {
    #[test]
    fn residuation(idx in 0usize..9, a in 0usize..5, b in 0usize..5, c in 0usize..5) {
        let algs = algebras();
        let h = &algs[idx % algs.len()];
        let n = h.len();
        let (a, b, c) = (a % n, b % n, c % n);
        prop_assert_eq!(h.leq(h.meet(a, b), c), h.leq(a, h.imp(b, c)));
        prop_assert!(h.leq(a, h.ddn(a)));
        prop_assert_eq!(h.ddn(h.meet(a, b)), h.meet(h.ddn(a), h.ddn(b)));
        prop_assert!(h.leq(h.meet(a, h.neg(a)), h.bottom()));
    }

    #[test]
    fn reindexing_is_monotone(f in proptest::collection::vec(0usize..3, 3), phi in proptest::collection::vec(0usize..3, 3), psi in proptest::collection::vec(0usize..3, 3)) {
        let fr = heyting_frame(&HeytingAlgebra::builtin(Builtin::Chain3)).unwrap();
        if ufam_leq(&fr, &phi, &psi) {
            prop_assert!(ufam_leq(&fr, &ufam_reindex(&f, &phi), &ufam_reindex(&f, &psi)));
        }
        let ex = ufam_exists(&fr, &f, &phi, 3);
        let all = ufam_forall(&fr, &f, &phi, 3);
        prop_assert!(ufam_leq(&fr, &phi, &ufam_reindex(&f, &ex)));
        prop_assert!(ufam_leq(&fr, &ufam_reindex(&f, &all), &phi));
    }
}

#[test]
fn every_algebra_validates_and_induces_a_frame() {
    for h in algebras() {
        assert!(validate_algebra(&h).is_verified(), "{}", h.name());
        let f = heyting_frame(&h).unwrap();
        let r = validate_frame(&f, &f.full_sample());
        assert!(r.is_verified(), "{}: {r}", h.name());
    }
}

#[test]
fn broken_implication_is_caught() {
    let h = HeytingAlgebra::builtin(Builtin::Chain3).with_imp_entry(2, 1, 2);
    let r = validate_algebra(&h);
    assert!(r.is_counterexample(), "{r}");
    assert!(heyting_frame(&h).is_err());
}

#[test]
fn broken_frame_is_caught() {
    let f = heyting_frame(&builtin_algebra("CHAIN3").unwrap()).unwrap();
    let bad = f.map_uimp(|fr, _, _| fr.top1());
    let r = validate_frame(&bad, &bad.full_sample());
    assert!(r.is_counterexample(), "{r}");
}

#[test]
fn non_distributive_lattice_is_rejected() {
    let names = ["0", "a", "b", "c", "1"];
    let pairs = [("0", "a"), ("0", "b"), ("0", "c"), ("a", "1"), ("b", "1"), ("c", "1")];
    if let Ok(h) = HeytingAlgebra::from_order(&names, &pairs) {
        assert!(!validate_algebra(&h).is_verified());
    }
}

#[test]
fn frame_files() {
    let f = FiniteFrame::from_file_text("heyting DIAMOND4").unwrap();
    assert_eq!(f.num_props(), 4);
    assert!(FiniteFrame::from_file_text("heyting NOPE").is_err());
    assert!(FiniteFrame::from_file_text("props = 3").is_err());
}

#[test]
fn tripos_on_small_frames() {
    for b in Builtin::ALL {
        let f = heyting_frame(&HeytingAlgebra::builtin(b)).unwrap();
        assert!(check_adjunctions(&f, 3).is_verified());
        assert!(check_beck_chevalley(&f, 2).is_verified());
        assert!(check_generic_element(&f, 3).is_verified());
    }
}
