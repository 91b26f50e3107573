use evframe_core::frame::{heyting_frame, FiniteFrame};
use evframe_core::heyting::{Builtin, HeytingAlgebra};
use evframe_core::topology::{
    check_separated, check_sheaf, double_negation, identity_topology, leq_check, parse_topology, sheaf_family,
    sheaf_oracle, subobjects, validate_topology, Topology, Universe,
};
use evframe_core::topos::{parse_morphism, parse_object, Eft, EftObject};
use proptest::prelude::*;

fn frame(b: Builtin) -> FiniteFrame {
    heyting_frame(&HeytingAlgebra::builtin(b)).unwrap()
}

proptest! {
    #[test]
    fn objects_are_exactly_the_valid_tables(cells in proptest::collection::vec(0usize..3, 3)) {
        let f = frame(Builtin::Chain3);
        let eft = Eft::new(&f);
        let o = EftObject::new(vec![vec![cells[0], cells[1]], vec![cells[1], cells[2]]]);
        let listed = eft.enumerate_objects(2).iter().any(|x| x.eq == o.eq);
        prop_assert_eq!(eft.validate_object(&o).is_verified(), listed);
    }

    #[test]
    fn identities_and_composition(i in 0usize..17, j in 0usize..17, k in 0usize..17) {
        let f = frame(Builtin::Chain3);
        let eft = Eft::new(&f);
        let objs = eft.enumerate_objects(2);
        let (a, b, c) = (&objs[i], &objs[j], &objs[k]);
        for g in eft.hom(a, b) {
            prop_assert!(eft.is_fpred(&g));
            prop_assert!(eft.eq(&eft.compose(&g, &eft.identity(a)), &g));
            prop_assert!(eft.eq(&eft.compose(&eft.identity(b), &g), &g));
            for h in eft.hom(b, c).iter().take(4) {
                prop_assert!(eft.is_fpred(&eft.compose(h, &g)));
            }
        }
    }

    #[test]
    fn topology_tables_match_the_algebra(j in proptest::collection::vec(0usize..3, 3)) {
        let h = HeytingAlgebra::builtin(Builtin::Chain3);
        let f = frame(Builtin::Chain3);
        let t = Topology { name: "table".into(), j: j.clone() };
        let laws = h.elements().all(|a| {
            h.leq(a, j[a])
                && h.leq(j[j[a]], j[a])
                && h.elements().all(|b| j[h.meet(a, b)] == h.meet(j[a], j[b]))
        });
        prop_assert_eq!(validate_topology(&f, &t).is_verified(), laws);
    }

    #[test]
    fn sep_agrees_with_injectivity(i in 0usize..22, dnn in any::<bool>()) {
        let f = frame(Builtin::Chain3);
        let t = if dnn { double_negation(&f) } else { identity_topology(&f) };
        let eft = Eft::new(&f);
        let mut u = Universe::new(&eft, 2);
        let a = i % u.objs.len();
        let obj = u.objs[a].clone();
        let oracle = sheaf_oracle(&mut u, &t, a);
        prop_assert_eq!(check_separated(&f, &t, &obj).is_verified(), oracle.injective);
        if oracle.injective {
            let family = sheaf_family(&mut u, &t, a);
            prop_assert_eq!(check_sheaf(&eft, &t, &obj, &family).is_verified(), oracle.bijective);
        }
    }
}

#[test]
fn sep_witness_names_the_pair() {
    let f = frame(Builtin::Chain3);
    let o = parse_object(&f, "carrier = [\"a\", \"b\"]\neq = [[\"1\", \"h\"], [\"h\", \"1\"]]\n").unwrap();
    let r = check_separated(&f, &double_negation(&f), &o);
    assert!(r.is_counterexample());
    assert_eq!(r.witness().lines[0], "(a, b) = (a, b): ex(a) = 1, ex(b) = 1, j(a∼b) = 1, a∼b = h");
    assert!(check_separated(&f, &identity_topology(&f), &o).is_verified());
}

#[test]
fn dnn_sheaves_on_boolean_frames() {
    let f = frame(Builtin::Bool2);
    let t = double_negation(&f);
    let eft = Eft::new(&f);
    let mut u = Universe::new(&eft, 2);
    for a in 0..u.objs.len() {
        assert!(sheaf_oracle(&mut u, &t, a).bijective);
    }
}

#[test]
fn leq_is_composite_equality() {
    let f = frame(Builtin::Chain3);
    let eft = Eft::new(&f);
    let x = parse_object(&f, "carrier = [\"p\", \"q\"]\neq = [[\"1\", \"0\"], [\"0\", \"1\"]]\n").unwrap();
    let a = parse_object(&f, "carrier = [\"u\", \"v\"]\neq = [[\"1\", \"0\"], [\"0\", \"1\"]]\n").unwrap();
    let hs = eft.hom(&x, &a);
    for chi in subobjects(&eft, &x) {
        let m = eft.canonical_subobject(&x, &chi);
        for g1 in &hs {
            for g2 in &hs {
                let direct = eft.eq(&eft.compose(g1, &m), &eft.compose(g2, &m));
                assert_eq!(leq_check(&eft, &x, &chi, g1, g2).is_verified(), direct);
            }
        }
    }
}

#[test]
fn morphism_and_topology_files() {
    let f = frame(Builtin::Chain3);
    let eft = Eft::new(&f);
    let m = parse_morphism(
        &eft,
        "function = [\"t\", \"t\"]\n[source]\ncarrier = [\"a\", \"b\"]\neq = [[\"1\", \"0\"], [\"0\", \"1\"]]\n[target]\ncarrier = [\"t\"]\neq = [[\"1\"]]\n",
    )
    .unwrap();
    assert!(eft.is_fpred(&m));
    let t = parse_topology(&f, "name = \"closed\"\nj = { \"0\" = \"h\", h = \"h\", \"1\" = \"1\" }\n").unwrap();
    assert!(validate_topology(&f, &t).is_verified());
    assert!(parse_topology(&f, "j = { \"0\" = \"0\" }\n").is_err());
    let classifier = eft.omega();
    assert!(eft.is_object(&classifier));
}
