use evframe_core::cps::{
    check_dne, computation_test, dne_evidence, lift_k1_evidence, m1_dne_contrast, pole_test,
};
use evframe_core::frame::{EvidencedFrame, Verdict};
use evframe_core::heyting::Truth;
use evframe_core::machine::{pole_run, throw_to, Outcome};
use evframe_core::mca::{parse_prop_file, Bounds, Expression, M1Value, MonadicCore, MonadicValue, Prop, Tier};
use evframe_core::term::{parse_term, Atom, Term, K, S};
use proptest::prelude::*;

fn t(s: &str) -> Term {
    parse_term(s).unwrap()
}

fn bounds_strategy() -> impl Strategy<Value = Bounds> {
    (1usize..5, 1u64..100_000, 1usize..4, 1usize..4, any::<bool>()).prop_map(|(leaves, fuel, pool, psi, cc)| {
        let mut b = Bounds::desk(leaves);
        b.fuel = fuel;
        b.pool_leaves = pool;
        b.psi_cap = psi;
        if cc {
            b.pool_basis.push(Atom::CC);
        }
        b
    })
}

proptest! {
    #[test]
    fn bounds_display_parses_back(b in bounds_strategy()) {
        let back: Bounds = b.to_string().parse().unwrap();
        prop_assert_eq!(back, b);
    }

    #[test]
    fn m1_application_is_deterministic(i in 0usize..40, j in 0usize..40) {
        let core = MonadicCore::new(Tier::M1, Bounds::desk(3));
        let u = core.universe();
        let (a, b) = (&u[i % u.len()], &u[j % u.len()]);
        let e = Expression::bullet(Expression::code(a.clone()), Expression::code(b.clone()));
        prop_assert_eq!(core.evaluate(&e).unwrap(), core.apply(a, b));
        let k = Expression::bullet(Expression::bullet(Expression::code(K), Expression::code(a.clone())), Expression::code(b.clone()));
        prop_assert_eq!(core.evaluate(&k).unwrap(), MonadicValue::M1(M1Value::One(a.clone())));
    }
}

#[test]
fn bounds_require_every_key() {
    assert!("basis=S,K leaves=3".parse::<Bounds>().is_err());
    assert!("basis=S,K leaves=3 fuel=10 pool_basis=S,K pool=2 psi=2 extra=1".parse::<Bounds>().is_err());
    assert!("basis=S,Q leaves=3 fuel=10 pool_basis=S,K pool=2 psi=2".parse::<Bounds>().is_err());
}

#[test]
fn evidence_on_both_tiers() {
    for tier in [Tier::M1, Tier::Cps] {
        let core = MonadicCore::new(tier, Bounds::desk(3));
        let id = t("S K K");
        let p = Prop::equals(K);
        assert!(core.check_evidence(&id, &p, &p).is_verified());
        assert!(core.check_evidence(&id, &p, &Prop::equals(S)).is_counterexample());
        assert_eq!(core.entails(&Prop::never(), &K, &Prop::never()), Verdict::Holds);
    }
}

#[test]
fn k1_evidence_lifts() {
    let m1 = MonadicCore::new(Tier::M1, Bounds::desk(3));
    let cps = MonadicCore::new(Tier::Cps, Bounds::desk(3));
    let p = Prop::set([K, t("K K")]);
    assert!(lift_k1_evidence(&m1, &cps, &t("S K K"), &p, &p).is_verified());
    assert!(lift_k1_evidence(&m1, &cps, &t("K S"), &p, &p).is_counterexample());
}

#[test]
fn dne_needs_control() {
    let cps = MonadicCore::new(Tier::Cps, Bounds::desk(3));
    for phi in [Prop::equals(K), Prop::set([S, t("K K")]), Prop::never()] {
        let r = check_dne(&cps, &phi);
        assert!(r.is_verified(), "{r}");
        assert!(r.witness().lines.iter().any(|l| l.starts_with("cc trace of CC")), "{r}");
    }
    let m1 = MonadicCore::new(Tier::M1, Bounds::desk(3));
    let r = m1_dne_contrast(&m1, &[Prop::equals(K), Prop::equals(S)], 3);
    assert!(!r.is_verified(), "{r}");
    assert_eq!(dne_evidence(), t("K CC"));
}

#[test]
fn pole_and_runs() {
    assert!(pole_test(&t("K Z0"), &S, 100).is_verified());
    assert!(pole_test(&K, &S, 100).is_counterexample());
    let omega = t("S (S K K) (S K K) (S (S K K) (S K K))");
    assert!(pole_test(&omega, &S, 200).is_inconclusive());
    assert!(computation_test(&Term::app(throw_to(&t("K Z0")), S), &K, 100).is_verified());
    assert_eq!(pole_run(&t("K Z0"), &S, 10, false).outcome, Outcome::Accept);
    assert!(matches!(pole_run(&Term::atom(Atom::Zero), &S, 10, false).outcome, Outcome::Stuck(_)));
}

#[test]
fn modality_is_exact_on_returns() {
    let cps = MonadicCore::new(Tier::Cps, Bounds::desk(2));
    let ret_k = cps.eta(&K);
    assert_eq!(cps.modality_apply(&ret_k, &Prop::equals(K)).unwrap(), Truth::Known(1));
    assert_eq!(cps.modality_apply(&ret_k, &Prop::equals(S)).unwrap(), Truth::Known(0));
}

#[test]
fn prop_files() {
    let text = r#"
        [[prop]]
        name = "isK"
        kind = "equals"
        term = "K"

        [[prop]]
        name = "tab"
        kind = "table"
        default = "0"
        entries = { "K" = "1", "S K" = "1" }
    "#;
    let ps = parse_prop_file(text).unwrap();
    assert_eq!(ps.len(), 2);
    let core = MonadicCore::new(Tier::Cps, Bounds::desk(2));
    assert_eq!(core.prop_at(&ps[1], &t("S K")), Truth::Known(1));
    assert!(check_dne(&core, &ps[1]).is_verified());
    assert!(parse_prop_file("[[prop]]\nname = \"x\"\nkind = \"weird\"\n").is_err());
}
