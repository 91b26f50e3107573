//! Operational checks on the continuation tier: pole tests, the modality as
//! a checked judgment, double-negation elimination via `CC`, lifting of
//! partiality-tier evidence, and the two machine equations.

use std::collections::HashSet;
use std::thread;

use crate::check::{CheckResult, Witness};
use crate::frame::{validate_frame_passing, EvidencedFrame, FrameSample, Verdict};
use crate::heyting::Truth;
use crate::machine::{computation_run, pole_run, run, throw_to, Outcome, Process, Ret, Run};
use crate::mca::{is_proof_like, show_truth, Bounds, MonadicCore, Prop, Tier};
use crate::reduce::enumerate_terms;
use crate::term::{abstract_var, Atom, Term, K};

fn trace_lines(r: &Run) -> impl Iterator<Item = String> + '_ {
    r.trace.iter().map(|l| format!("  {l}"))
}

/// `k ⊥ a`, with the machine trace.
pub fn pole_test(k: &Term, a: &Term, fuel: u64) -> CheckResult {
    let r = pole_run(k, a, fuel, true);
    let w = Witness::new(format!("{k} ⊥ {a}")).with_lines(trace_lines(&r));
    match r.outcome {
        Outcome::Accept => CheckResult::Verified(w),
        Outcome::OutOfFuel => CheckResult::Inconclusive(w),
        _ => CheckResult::Counterexample(w),
    }
}

/// `◇⟨x ∈ m⟩φ` judged on the continuation tier, with the symbolic run as trace.
pub fn cps_modality(core: &MonadicCore, m: &Term, phi: &Prop) -> CheckResult {
    assert_eq!(core.tier(), Tier::Cps, "cps_modality needs the continuation tier");
    let t = core.diamond(m, phi);
    let r = run(Process::new(m.clone(), Ret::Hole), core.bounds().fuel, true);
    let w = Witness::new(format!("◇⟨{m}⟩{phi} = {} (pool of {})", show_truth(t), core.pool().len()))
        .with_lines(trace_lines(&r));
    match t {
        Truth::Known(1) => CheckResult::Verified(w),
        Truth::Known(_) => CheckResult::Counterexample(w),
        Truth::Unknown => CheckResult::Inconclusive(w),
    }
}

/// `λ*z. CC`.
pub fn dne_evidence() -> Term {
    abstract_var("z", &Term::atom(Atom::CC))
}

/// `λ*x. Z0`, the continuation that accepts everything.
pub fn constant_zero() -> Term {
    abstract_var("x", &Term::atom(Atom::Zero))
}

/// `⊤ ⊢ ¬¬φ ⊃ φ` with evidence `λz.CC` on the continuation tier. Every
/// verified report carries the run of `CC a` for a code `a` realizing `¬¬φ`.
pub fn check_dne(core: &MonadicCore, phi: &Prop) -> CheckResult {
    let e = dne_evidence();
    let dn = Prop::dnn(phi);
    let body = core.check_evidence(&e, &Prop::always(), &Prop::imp(&dn, phi));
    let realizers = core
        .args()
        .iter()
        .filter(|a| core.prop_at(&dn, a) == Truth::Known(1))
        .count();
    let sample = core
        .args()
        .iter()
        .find(|a| core.prop_at(&dn, a) == Truth::Known(1))
        .cloned()
        .unwrap_or_else(|| throw_to(&constant_zero()));
    let m = Term::app(Term::atom(Atom::CC), sample);
    let r = run(Process::new(m.clone(), Ret::Hole), core.bounds().fuel, true);
    let mut w = Witness::new(format!("double-negation elimination for {phi} via {e}"))
        .with_line(format!("{} tier, |U| = {}, pool of {}", core.tier(), core.universe().len(), core.pool().len()))
        .with_line(format!("¬¬φ realized by {realizers} of {} codes", core.args().len()))
        .with_lines(body.witness().lines.iter().cloned());
    w = w.with_line(format!("cc trace of {m}:")).with_lines(trace_lines(&r));
    match body {
        CheckResult::Verified(_) => CheckResult::Verified(w),
        CheckResult::Counterexample(_) => CheckResult::Counterexample(w),
        CheckResult::Inconclusive(_) => CheckResult::Inconclusive(w),
    }
}

/// The same evidence on the partiality tier, where `CC` is inert, followed by
/// a bounded search for any evidence uniform over the whole family `phis`.
/// A counterexample is the expected outcome when the family has two disjoint members.
pub fn m1_dne_contrast(core: &MonadicCore, phis: &[Prop], search_leaves: usize) -> CheckResult {
    assert_eq!(core.tier(), Tier::M1, "the contrast runs on the partiality tier");
    let goal = |phi: &Prop| Prop::imp(&Prop::dnn(phi), phi);
    let cc = dne_evidence();
    let mut w = Witness::new(format!("uniform double-negation elimination for {} propositions (M1)", phis.len()));
    let cc_fails = phis
        .iter()
        .find(|phi| core.check_evidence(&cc, &Prop::always(), &goal(phi)).is_counterexample());
    match cc_fails {
        Some(phi) => w = w.with_line(format!("{cc} fails for {phi}")),
        None => return CheckResult::Verified(w.with_line(format!("{cc} works for every member"))),
    }
    let candidates = enumerate_terms(&[Atom::S, Atom::K, Atom::Pair, Atom::Fst, Atom::Snd], search_leaves);
    let mut undecided = 0;
    for e in &candidates {
        let rs: Vec<CheckResult> = phis
            .iter()
            .map(|phi| core.check_evidence(e, &Prop::always(), &goal(phi)))
            .collect();
        if rs.iter().all(|r| r.is_verified()) {
            return CheckResult::Verified(w.with_line(format!("uniform evidence {e}")));
        }
        if !rs.iter().any(|r| r.is_counterexample()) {
            undecided += 1;
        }
    }
    w = w.with_line(format!(
        "no uniform evidence among {} separator terms of ≤ {search_leaves} leaves ({undecided} undecided)",
        candidates.len()
    ));
    if undecided > 0 {
        CheckResult::Inconclusive(w)
    } else {
        CheckResult::Counterexample(w)
    }
}

/// Re-checks partiality-tier evidence `φ ⊢e ψ` on the continuation tier.
pub fn lift_k1_evidence(m1: &MonadicCore, cps: &MonadicCore, e: &Term, phi: &Prop, psi: &Prop) -> CheckResult {
    if !is_proof_like(e) {
        return CheckResult::counterexample(format!("{e} is not proof-like"));
    }
    let pre = m1.check_evidence(e, phi, psi);
    if !pre.is_verified() {
        return CheckResult::Counterexample(
            Witness::new(format!("precondition: {phi} ⊢{e} {psi} not verified on M1"))
                .with_lines(pre.witness().lines.iter().cloned()),
        );
    }
    cps.check_evidence(e, phi, psi)
}

/// Table propositions for the double-negation regression: every singleton
/// of `U`, then consecutive pairs and triples, each true exactly on its
/// codes.
pub fn dne_regression(core: &MonadicCore) -> Vec<Prop> {
    let u = core.universe();
    let n = u.len();
    let mut out = Vec::new();
    for width in 1..=3.min(n) {
        for i in 0..n {
            let codes: Vec<Term> = (0..width).map(|d| u[(i + d) % n].clone()).collect();
            let name = format!("tbl{{{}}}", codes.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "));
            out.push(Prop::named(&name, &Prop::table(codes.into_iter().map(|c| (c, 1)), 0)));
        }
    }
    out
}

/// Re-judges on the CPS tier every conformance instance that held on the M1
/// tier over `sample`, with the same premises. Verified iff all lift.
pub fn check_lift_rate(m1: &MonadicCore, cps: &MonadicCore, sample: &FrameSample<Prop, Term>) -> CheckResult {
    let (base, passed) = validate_frame_passing(m1, sample);
    if !base.is_verified() {
        return CheckResult::Inconclusive(
            Witness::new("the M1 tier does not verify the sample").with_lines(std::iter::once(base.to_string())),
        );
    }
    let mut seen = HashSet::new();
    let (mut total, mut lifted) = (0usize, 0usize);
    let mut unknown = None;
    for inst in &passed {
        let c = &inst.conclusion;
        let key = (
            c.phi.clone(),
            c.e.clone(),
            c.psi.clone(),
            inst.premises.iter().map(|p| (p.phi.clone(), p.e.clone(), p.psi.clone())).collect::<Vec<_>>(),
        );
        if !seen.insert(key) {
            continue;
        }
        total += 1;
        if !is_proof_like(&c.e) {
            return CheckResult::counterexample(format!("{} is not proof-like", c.e));
        }
        let v = if inst.premises.is_empty() {
            cps.entails(&c.phi, &c.e, &c.psi)
        } else {
            cps.entails_given(&c.phi, &c.e, &c.psi, &inst.premises)
        };
        match v {
            Verdict::Holds => lifted += 1,
            Verdict::Fails(at) => {
                return CheckResult::Counterexample(
                    Witness::new(format!("{}: {} ⊢{} {} does not lift", inst.row, c.phi, c.e, c.psi))
                        .with_line(format!("fails at {at}"))
                        .with_line(format!("{lifted} of {total} lifted so far")),
                )
            }
            Verdict::Unknown(at) => {
                unknown.get_or_insert_with(|| format!("{}: {} ⊢{} {} undecided at {at}", inst.row, c.phi, c.e, c.psi));
            }
        }
    }
    if let Some(u) = unknown {
        return CheckResult::Inconclusive(
            Witness::new(format!("{lifted} of {total} lifted, rest undecided")).with_line(u),
        );
    }
    CheckResult::Verified(
        Witness::new(format!("lift rate 100%: {lifted} of {total} M1 instances re-verify on CPS"))
            .with_line(format!("{}", cps.bounds())),
    )
}

fn same_terminal(l: &Run, r: &Run) -> bool {
    l.outcome == r.outcome && l.handed == r.handed
}

/// Both equations `(CC·c)(k) = (c·throw_k)(k)` and `(throw_k·c′)(k′) = k(c′)`,
/// as equal terminal states and handed values. `c` ranges over terms of
/// ≤ `c_leaves` leaves over the pool basis plus `CC`; stacks `σ` over
/// sequences of depth ≤ 2 of pool terms with ≤ 2 leaves; `k` over the same
/// terms plus `λx.Z0`; `σ′` over `ε` and `[K]`, with `k′ = K`.
pub fn check_machine_equations(bounds: &Bounds, c_leaves: usize) -> CheckResult {
    let mut basis = bounds.pool_basis.clone();
    if !basis.contains(&Atom::CC) {
        basis.push(Atom::CC);
    }
    let codes = enumerate_terms(&basis, c_leaves);
    let small = enumerate_terms(&bounds.pool_basis, 2);
    let mut stacks: Vec<Vec<Term>> = vec![Vec::new()];
    for a in &small {
        stacks.push(vec![a.clone()]);
        for b in &small {
            stacks.push(vec![a.clone(), b.clone()]);
        }
    }
    let mut ks = small.clone();
    ks.push(constant_zero());
    let outer_stacks = [Vec::new(), vec![K]];
    let fuel = bounds.fuel;
    let workers = thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(16);
    let chunk = codes.len().div_ceil(workers).max(1);
    let results: Vec<(u64, Option<String>)> = thread::scope(|s| {
        let handles: Vec<_> = codes
            .chunks(chunk)
            .map(|cs| {
                let (stacks, ks, outer) = (&stacks, &ks, &outer_stacks);
                s.spawn(move || {
                    let mut n = 0u64;
                    for c in cs {
                        for sigma in stacks {
                            for k in ks {
                                n += 1;
                                let mut st = sigma.clone();
                                st.push(c.clone());
                                let left = run(
                                    Process {
                                        head: Term::atom(Atom::CC),
                                        stack: st,
                                        ret: Ret::To(k.clone()),
                                    },
                                    fuel + 1,
                                    false,
                                );
                                let mut st = sigma.clone();
                                st.push(Term::cont(sigma.clone(), Some(k.clone())));
                                let right = run(
                                    Process {
                                        head: c.clone(),
                                        stack: st,
                                        ret: Ret::To(k.clone()),
                                    },
                                    fuel,
                                    false,
                                );
                                if !same_terminal(&left, &right) {
                                    return (n, Some(format!("CC equation: c = {c}, σ = {sigma:?}, k = {k}")));
                                }
                                for outer in outer {
                                    n += 1;
                                    let mut st = outer.clone();
                                    st.push(c.clone());
                                    let left = run(
                                        Process {
                                            head: Term::cont(sigma.clone(), Some(k.clone())),
                                            stack: st,
                                            ret: Ret::To(K),
                                        },
                                        fuel + 1,
                                        false,
                                    );
                                    let right = run(
                                        Process {
                                            head: c.clone(),
                                            stack: sigma.clone(),
                                            ret: Ret::To(k.clone()),
                                        },
                                        fuel,
                                        false,
                                    );
                                    if !same_terminal(&left, &right) {
                                        return (
                                            n,
                                            Some(format!("throw equation: c′ = {c}, σ = {sigma:?}, k = {k}")),
                                        );
                                    }
                                }
                            }
                        }
                    }
                    (n, None)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let total: u64 = results.iter().map(|r| r.0).sum();
    if let Some(msg) = results.iter().find_map(|r| r.1.clone()) {
        return CheckResult::counterexample(msg);
    }
    CheckResult::Verified(
        Witness::new(format!("both machine equations on {total} instances"))
            .with_line(format!(
                "{} codes ≤ {c_leaves} leaves, {} stacks, {} continuations, fuel {fuel}",
                codes.len(),
                stacks.len(),
                ks.len()
            )),
    )
}

/// `m ⊥ k` with the trace, for reports.
pub fn computation_test(m: &Term, k: &Term, fuel: u64) -> CheckResult {
    let r = computation_run(m, k, fuel, true);
    let w = Witness::new(format!("{m} ⊥ {k}")).with_lines(trace_lines(&r));
    match r.outcome {
        Outcome::Accept => CheckResult::Verified(w),
        Outcome::OutOfFuel => CheckResult::Inconclusive(w),
        _ => CheckResult::Counterexample(w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, S};

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn pole_examples() {
        assert!(pole_test(&constant_zero(), &S, 100).is_verified());
        let r = pole_test(&K, &S, 100);
        assert!(r.is_counterexample());
        assert!(r.witness().lines.last().unwrap().contains("stuck"));
        let w = p("S (S K K) (S K K)");
        assert!(pole_test(&Term::app(w.clone(), w), &S, 500).is_inconclusive());
    }

    #[test]
    fn modality_examples() {
        let c = MonadicCore::new(Tier::Cps, Bounds::desk(2));
        assert!(cps_modality(&c, &K, &Prop::equals(K)).is_verified());
        assert!(cps_modality(&c, &Term::app(throw_to(&K), S), &Prop::always()).is_counterexample());
    }

    #[test]
    fn dne_on_simple_props() {
        let c = MonadicCore::new(Tier::Cps, Bounds::desk(2));
        let r = check_dne(&c, &Prop::always());
        assert!(r.is_verified(), "{r}");
        assert!(r.witness().lines.iter().any(|l| l.contains("cc trace")));
        let r = check_dne(&c, &Prop::equals(K));
        assert!(r.is_verified(), "{r}");
    }

    #[test]
    fn m1_contrast() {
        let c = MonadicCore::new(Tier::M1, Bounds::desk(2));
        let r = m1_dne_contrast(&c, &[Prop::equals(K), Prop::equals(S)], 3);
        assert!(r.is_counterexample(), "{r}");
    }

    #[test]
    fn lifting() {
        let b = Bounds::desk(2);
        let m1 = MonadicCore::new(Tier::M1, b.clone());
        let cps = MonadicCore::new(Tier::Cps, b);
        let t = Prop::set([K, p("K K")]);
        assert!(lift_k1_evidence(&m1, &cps, &Term::identity(), &t, &t).is_verified());
        assert!(lift_k1_evidence(&m1, &cps, &throw_to(&K), &t, &t).is_counterexample());
    }

    #[test]
    fn machine_equations_small() {
        let r = check_machine_equations(&Bounds::desk(2), 2);
        assert!(r.is_verified(), "{r}");
    }
}
