use evframe_core::reduce::{enumerate_terms, is_normal, normal_universe, reduce, ReductionOutcome};
use evframe_core::term::{abstract_var, abstract_vars, parse_term, Atom, Term, K, S};
use proptest::prelude::*;

fn atom() -> impl Strategy<Value = Term> {
    prop_oneof![
        Just(S),
        Just(K),
        Just(Term::atom(Atom::Pair)),
        Just(Term::atom(Atom::Fst)),
        Just(Term::atom(Atom::Snd)),
    ]
}

fn closed_term() -> impl Strategy<Value = Term> {
    atom().prop_recursive(4, 12, 2, |inner| (inner.clone(), inner).prop_map(|(f, x)| Term::app(f, x)))
}

fn open_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![atom(), Just(Term::var("x")), Just(Term::var("y"))];
    leaf.prop_recursive(4, 12, 2, |inner| (inner.clone(), inner).prop_map(|(f, x)| Term::app(f, x)))
}

fn nf(t: &Term) -> Option<Term> {
    match reduce(t, 2_000).expect("closed") {
        ReductionOutcome::Value(v) => Some(v),
        ReductionOutcome::OutOfBudget(_) => None,
    }
}

proptest! {
    #[test]
    fn print_parse_round_trip(t in open_term()) {
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn normal_forms_are_fixed_points(t in closed_term()) {
        if let Some(v) = nf(&t) {
            prop_assert!(is_normal(&v));
            prop_assert_eq!(nf(&v), Some(v.clone()));
        }
    }

    #[test]
    fn bracket_abstraction_beta(body in open_term(), arg in closed_term(), other in closed_term()) {
        let lam = abstract_var("x", &body.substitute("y", &other));
        prop_assert!(!lam.occurs("x"));
        let lhs = nf(&Term::app(lam, arg.clone()));
        let rhs = nf(&body.substitute("y", &other).substitute("x", &arg));
        if let (Some(l), Some(r)) = (lhs, rhs) {
            prop_assert_eq!(l, r);
        }
    }

    #[test]
    fn projections(a in closed_term(), b in closed_term()) {
        let pair = Term::apply_all(Term::atom(Atom::Pair), [a.clone(), b.clone()]);
        if let (Some(na), Some(nb)) = (nf(&a), nf(&b)) {
            prop_assert_eq!(nf(&Term::app(Term::atom(Atom::Fst), pair.clone())), Some(na));
            prop_assert_eq!(nf(&Term::app(Term::atom(Atom::Snd), pair)), Some(nb));
        }
    }
}

#[test]
fn two_variable_abstraction() {
    let body = parse_term("y x").unwrap();
    let swap = abstract_vars(&["x", "y"], &body);
    let applied = Term::apply_all(swap, [K, S]);
    assert_eq!(nf(&applied), Some(parse_term("S K").unwrap()));
}

#[test]
fn divergence_runs_out_of_budget() {
    let omega = parse_term("S (S K K) (S K K) (S (S K K) (S K K))").unwrap();
    assert!(matches!(reduce(&omega, 500).unwrap(), ReductionOutcome::OutOfBudget(_)));
}

#[test]
fn universes() {
    let all = enumerate_terms(&[Atom::S, Atom::K], 3);
    let normal = normal_universe(&[Atom::S, Atom::K], 3);
    assert!(normal.len() < all.len());
    assert!(normal.iter().all(is_normal));
    assert!(all.iter().all(|t| t.size() <= 3));
    assert!(parse_term("S (K").is_err());
}
