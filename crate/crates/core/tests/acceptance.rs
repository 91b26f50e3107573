//! Acceptance criteria 1 to 10, one pass/fail line each.

use std::time::{Duration, Instant};

use evframe_core::characteristic::check_bridge;
use evframe_core::check::CheckResult;
use evframe_core::cps::{check_dne, check_lift_rate, check_machine_equations, dne_regression};
use evframe_core::frame::{heyting_frame, validate_frame};
use evframe_core::heyting::{validate_algebra, Builtin, HeytingAlgebra};
use evframe_core::mca::{Bounds, MonadicCore, Prop, Tier};
use evframe_core::term::S;
use evframe_core::topology::{
    builtin_instances, check_density_bounded, check_density_lemmas, check_j_distribution_bounded,
    check_oracle_equivalence, validate_topology_bounded,
};
use evframe_core::topos::{check_topos, Eft};
use evframe_core::tripos::{check_adjunctions, check_beck_chevalley};

struct Outcome {
    pass: bool,
    detail: String,
}

fn from_results(results: Vec<CheckResult>) -> Outcome {
    match results.iter().find(|r| !r.is_verified()) {
        Some(bad) => Outcome {
            pass: false,
            detail: bad.to_string(),
        },
        None => Outcome {
            pass: true,
            detail: results.iter().map(|r| r.witness().label.clone()).collect::<Vec<_>>().join("; "),
        },
    }
}

fn frames() -> Vec<(HeytingAlgebra, evframe_core::frame::FiniteFrame)> {
    Builtin::ALL
        .into_iter()
        .map(|b| {
            let h = HeytingAlgebra::builtin(b);
            let f = heyting_frame(&h).expect("builtin frame");
            (h, f)
        })
        .collect()
}

fn c1() -> Outcome {
    let mut results = Vec::new();
    for (h, _) in frames() {
        results.push(validate_algebra(&h));
        let shadow = h.elements().all(|a| {
            h.leq(a, h.ddn(a))
                && h.ddn(h.ddn(a)) == h.ddn(a)
                && h.elements().all(|b| h.ddn(h.meet(a, b)) == h.meet(h.ddn(a), h.ddn(b)))
        });
        results.push(if shadow {
            CheckResult::verified(format!("¬¬ shadow identities on {}", h.name()))
        } else {
            CheckResult::counterexample(format!("¬¬ shadow identities fail on {}", h.name()))
        });
    }
    from_results(results)
}

fn c2() -> Outcome {
    let mut results: Vec<CheckResult> = frames().iter().map(|(_, f)| validate_frame(f, &f.full_sample())).collect();
    for tier in [Tier::M1, Tier::Cps] {
        let core = MonadicCore::new(tier, Bounds::desk(4));
        results.push(validate_frame(&core, &core.default_sample()));
    }
    from_results(results)
}

fn c3() -> Outcome {
    let mut results = Vec::new();
    for (_, f) in frames() {
        results.push(check_adjunctions(&f, 4));
        results.push(check_beck_chevalley(&f, 3));
    }
    from_results(results)
}

fn c4() -> Outcome {
    let f = heyting_frame(&HeytingAlgebra::builtin(Builtin::Chain3)).expect("builtin frame");
    let eft = Eft::new(&f);
    from_results(check_topos(&eft, 2).into_iter().map(|(_, r)| r).collect())
}

fn c5() -> Outcome {
    from_results(
        builtin_instances()
            .iter()
            .map(|(f, t)| check_oracle_equivalence(f, t, 3, 2).0)
            .collect(),
    )
}

fn c6() -> Outcome {
    let mut results: Vec<CheckResult> = builtin_instances()
        .iter()
        .map(|(f, t)| check_density_lemmas(f, t, 2))
        .collect();
    let core = MonadicCore::new(Tier::M1, Bounds::desk(3));
    let props = core.default_sample().props;
    let laws: Vec<Prop> = props.iter().filter(|p| **p != Prop::equals(S)).cloned().collect();
    let cands = core.candidate_evidences();
    let j = |p: &Prop| Prop::dnn(p);
    results.push(validate_topology_bounded(&core, &j, &laws, &cands));
    results.push(check_j_distribution_bounded(&core, &j, &props, &cands));
    results.push(check_density_bounded(&core, &j, &props, &cands));
    from_results(results)
}

fn c7() -> Outcome {
    let core = MonadicCore::new(Tier::Cps, Bounds::desk(3));
    let mut props = core.default_sample().props;
    props.push(Prop::always());
    from_results(vec![
        check_machine_equations(&Bounds::desk(3), 3),
        core.check_after_return(&props, core.args()),
    ])
}

fn c8() -> Outcome {
    let m1 = MonadicCore::new(Tier::M1, Bounds::desk(4));
    let cps = MonadicCore::new(Tier::Cps, Bounds::desk(4));
    from_results(vec![check_lift_rate(&m1, &cps, &m1.default_sample())])
}

fn c9() -> Outcome {
    let core = MonadicCore::new(Tier::Cps, Bounds::desk(3));
    let props = dne_regression(&core);
    let results: Vec<CheckResult> = props.iter().map(|p| check_dne(&core, p)).collect();
    let traced = results
        .iter()
        .all(|r| r.witness().lines.iter().any(|l| l.starts_with("cc trace of")));
    let mut out = from_results(results);
    out.pass &= props.len() >= 20 && traced;
    out.detail = format!("{} table propositions, every report traced: {traced}; {}", props.len(), out.detail.split("; ").next().unwrap_or(""));
    out
}

fn c10() -> Outcome {
    let core = MonadicCore::new(Tier::M1, Bounds::desk(3));
    from_results(vec![check_bridge(&core, 60, 1)])
}

fn main() {
    type Criterion = (usize, &'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 10] = [
        (1, "Heyting laws and ¬¬ shadows", c1, Duration::from_secs(1)),
        (2, "evidenced-frame conformance", c2, Duration::from_secs(120)),
        (3, "tripos adjunctions and Beck-Chevalley", c3, Duration::from_secs(60)),
        (4, "category laws over CHAIN3", c4, Duration::from_secs(120)),
        (5, "oracle equivalence", c5, Duration::from_secs(600)),
        (6, "density lemmas and j-distribution", c6, Duration::from_secs(60)),
        (7, "machine equations and After-Return", c7, Duration::from_secs(60)),
        (8, "M1 to CPS lift rate", c8, Duration::from_secs(120)),
        (9, "double-negation elimination regression", c9, Duration::from_secs(300)),
        (10, "characteristic bridge", c10, Duration::from_secs(60)),
    ];
    let mut failed = Vec::new();
    for (n, name, run, limit) in criteria {
        let t = Instant::now();
        let out = run();
        let took = t.elapsed();
        let in_time = took <= limit;
        let pass = out.pass && in_time;
        let first = out.detail.lines().next().unwrap_or("").to_string();
        println!(
            "criterion {n}: {} {name} ({:.2}s, limit {}s): {first}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs()
        );
        if !pass {
            failed.push((n, out.detail, in_time));
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
