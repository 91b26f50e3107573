//! Evidenced frames: the abstract interface, finite frames given by explicit
//! tables, and a row-by-row law checker shared by finite and bounded frames.

use std::collections::HashMap;
use std::hash::Hash;

use serde::Deserialize;
use thiserror::Error;

use crate::check::{CheckResult, Witness};
use crate::heyting::{validate_algebra, HeytingAlgebra};

/// Outcome of a single relation instance `φ ⊢e ψ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// Fails; the string names the offending point (a code, for bounded frames).
    Fails(String),
    Unknown(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Holds
        } else {
            Verdict::Fails(String::new())
        }
    }
}

/// A relation instance already known to hold, passed to
/// [`EvidencedFrame::entails_given`].
#[derive(Debug, Clone)]
pub struct Premise<P, E> {
    pub phi: P,
    pub e: E,
    pub psi: P,
}

pub trait EvidencedFrame {
    type Prop: Clone + Eq + Hash;
    type Ev: Clone + Eq + Hash;

    fn show_prop(&self, p: &Self::Prop) -> String;
    fn show_ev(&self, e: &Self::Ev) -> String;

    fn entails(&self, phi: &Self::Prop, e: &Self::Ev, psi: &Self::Prop) -> Verdict;

    /// Judges a row conclusion whose premises hold on the frame's sample.
    /// Bounded frames override this to re-check premises at codes outside
    /// their universe before reporting a failure.
    fn entails_given(
        &self,
        phi: &Self::Prop,
        e: &Self::Ev,
        psi: &Self::Prop,
        premises: &[Premise<Self::Prop, Self::Ev>],
    ) -> Verdict {
        let _ = premises;
        self.entails(phi, e, psi)
    }

    fn top(&self) -> Self::Prop;
    fn and(&self, a: &Self::Prop, b: &Self::Prop) -> Self::Prop;
    fn uimp(&self, phi: &Self::Prop, psis: &[Self::Prop]) -> Self::Prop;
    fn bottom(&self) -> Self::Prop;
    fn big_coprod(&self, psis: &[Self::Prop]) -> Self::Prop;

    fn e_id(&self) -> Self::Ev;
    fn compose(&self, e1: &Self::Ev, e2: &Self::Ev) -> Self::Ev;
    fn e_top(&self) -> Self::Ev;
    fn pair(&self, e1: &Self::Ev, e2: &Self::Ev) -> Self::Ev;
    fn e_fst(&self) -> Self::Ev;
    fn e_snd(&self) -> Self::Ev;
    fn lam(&self, e: &Self::Ev) -> Self::Ev;
    fn e_eval(&self) -> Self::Ev;
}

pub fn imp<F: EvidencedFrame + ?Sized>(f: &F, a: &F::Prop, b: &F::Prop) -> F::Prop {
    f.uimp(a, std::slice::from_ref(b))
}

pub fn iff<F: EvidencedFrame + ?Sized>(f: &F, a: &F::Prop, b: &F::Prop) -> F::Prop {
    f.and(&imp(f, a, b), &imp(f, b, a))
}

pub fn big_pi<F: EvidencedFrame + ?Sized>(f: &F, psis: &[F::Prop]) -> F::Prop {
    f.uimp(&f.top(), psis)
}

pub fn neg<F: EvidencedFrame + ?Sized>(f: &F, a: &F::Prop) -> F::Prop {
    imp(f, a, &f.bottom())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivedOp {
    Iff,
    BigPi,
    Bottom,
    BigCoprod,
    SingletonImp,
}

/// The abbreviations built from the primitive connectives.
pub fn derived<F: EvidencedFrame + ?Sized>(f: &F, op: DerivedOp, args: &[F::Prop]) -> Option<F::Prop> {
    Some(match op {
        DerivedOp::Iff if args.len() == 2 => iff(f, &args[0], &args[1]),
        DerivedOp::SingletonImp if args.len() == 2 => imp(f, &args[0], &args[1]),
        DerivedOp::BigPi => big_pi(f, args),
        DerivedOp::Bottom if args.is_empty() => f.bottom(),
        DerivedOp::BigCoprod => f.big_coprod(args),
        _ => return None,
    })
}

/// `e';⟨e_⊤,e_id⟩;⟨e_fst;e, e_snd⟩;e_eval`: turns evidence of `φ ⊃ ψ` and of
/// `φ` into evidence of `ψ`.
pub fn deduction_composite<F: EvidencedFrame + ?Sized>(f: &F, e_imp: &F::Ev, e_phi: &F::Ev) -> F::Ev {
    let step1 = f.compose(e_phi, &f.pair(&f.e_top(), &f.e_id()));
    let step2 = f.compose(&step1, &f.pair(&f.compose(&f.e_fst(), e_imp), &f.e_snd()));
    f.compose(&step2, &f.e_eval())
}

/// Re-checks both premises, then checks `⊤ ⊢ ψ` under the composite.
pub fn deduction_forward<F: EvidencedFrame + ?Sized>(
    f: &F,
    phi: &F::Prop,
    psi: &F::Prop,
    e_imp: &F::Ev,
    e_phi: &F::Ev,
) -> (F::Ev, CheckResult) {
    let composite = deduction_composite(f, e_imp, e_phi);
    let top = f.top();
    let imp_prop = imp(f, phi, psi);
    let label = |what: &str| format!("deduction {what}: evidence {}", f.show_ev(&composite));
    for (name, prem) in [("implication premise", (&imp_prop, e_imp)), ("antecedent premise", (phi, e_phi))] {
        match f.entails(&top, prem.1, prem.0) {
            Verdict::Holds => {}
            Verdict::Fails(at) => {
                return (
                    composite.clone(),
                    CheckResult::Counterexample(Witness::new(format!("{name} fails")).with_line(at)),
                )
            }
            Verdict::Unknown(at) => {
                return (
                    composite.clone(),
                    CheckResult::Inconclusive(Witness::new(format!("{name} undecided")).with_line(at)),
                )
            }
        }
    }
    let premises = [
        Premise {
            phi: top.clone(),
            e: e_imp.clone(),
            psi: imp_prop,
        },
        Premise {
            phi: top.clone(),
            e: e_phi.clone(),
            psi: phi.clone(),
        },
    ];
    let r = match f.entails_given(&top, &composite, psi, &premises) {
        Verdict::Holds => CheckResult::Verified(Witness::new(label("verified"))),
        Verdict::Fails(at) => CheckResult::Counterexample(Witness::new(label("fails")).with_line(at)),
        Verdict::Unknown(at) => CheckResult::Inconclusive(Witness::new(label("undecided")).with_line(at)),
    };
    (composite, r)
}

/// First evidence in `evs` with `⊤ ⊢e φ`.
pub fn find_evidence<F: EvidencedFrame + ?Sized>(f: &F, phi: &F::Prop, evs: &[F::Ev]) -> Option<F::Ev> {
    let top = f.top();
    evs.iter().find(|e| f.entails(&top, e, phi).holds()).cloned()
}

/// The propositions and evidences a law check ranges over, and the cap on
/// the size of the sets `Ψ` in the universal-implication rows.
#[derive(Debug, Clone)]
pub struct FrameSample<P, E> {
    pub props: Vec<P>,
    pub evs: Vec<E>,
    pub psi_cap: usize,
}

/// All subsets of `items` with at most `cap` elements, by size then lexicographically.
pub fn bounded_subsets<T: Clone>(items: &[T], cap: usize) -> Vec<Vec<T>> {
    fn go<T: Clone>(items: &[T], start: usize, k: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            go(items, i + 1, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in 0..=cap.min(items.len()) {
        go(items, 0, k, &mut Vec::new(), &mut out);
    }
    out
}

type Triple<F> = (<F as EvidencedFrame>::Prop, <F as EvidencedFrame>::Ev, <F as EvidencedFrame>::Prop);

/// A row instance whose conclusion held, with the premises it was judged under.
#[derive(Debug, Clone)]
pub struct PassedInstance<P, E> {
    pub row: String,
    pub premises: Vec<Premise<P, E>>,
    pub conclusion: Premise<P, E>,
}

struct RowChecker<'a, F: EvidencedFrame + ?Sized> {
    f: &'a F,
    memo: HashMap<Triple<F>, Verdict>,
    instances: u64,
    pending: Option<Witness>,
    passed: Option<Vec<PassedInstance<F::Prop, F::Ev>>>,
}

impl<'a, F: EvidencedFrame + ?Sized> RowChecker<'a, F> {
    fn rel(&mut self, phi: &F::Prop, e: &F::Ev, psi: &F::Prop) -> Verdict {
        let key = (phi.clone(), e.clone(), psi.clone());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let v = self.f.entails(phi, e, psi);
        self.memo.insert(key, v.clone());
        v
    }

    /// Evaluates premises then conclusion; returns a counterexample witness
    /// when every premise holds and the conclusion fails.
    fn instance(
        &mut self,
        row: &str,
        shown: impl Fn() -> String,
        premises: &[(F::Prop, F::Ev, F::Prop)],
        conclusion: (F::Prop, F::Ev, F::Prop),
    ) -> Option<Witness> {
        self.instances += 1;
        let mut premise_unknown = None;
        for (p, e, q) in premises {
            match self.rel(p, e, q) {
                Verdict::Holds => {}
                Verdict::Fails(_) => return None,
                Verdict::Unknown(at) => premise_unknown = Some(at),
            }
        }
        let prem: Vec<Premise<F::Prop, F::Ev>> = premises
            .iter()
            .map(|(p, e, q)| Premise {
                phi: p.clone(),
                e: e.clone(),
                psi: q.clone(),
            })
            .collect();
        let (c_phi, c_e, c_psi) = conclusion;
        let v = if prem.is_empty() {
            self.rel(&c_phi, &c_e, &c_psi)
        } else {
            self.f.entails_given(&c_phi, &c_e, &c_psi, &prem)
        };
        let evidence = self.f.show_ev(&c_e);
        match (v, premise_unknown) {
            (Verdict::Holds, _) => {
                if let Some(passed) = self.passed.as_mut() {
                    passed.push(PassedInstance {
                        row: row.to_string(),
                        premises: prem,
                        conclusion: Premise {
                            phi: c_phi,
                            e: c_e,
                            psi: c_psi,
                        },
                    });
                }
                None
            }
            (Verdict::Fails(at), None) => Some(
                Witness::new(format!("{row} at {}", shown()))
                    .with_line(format!("evidence {evidence}"))
                    .with_line(format!("fails at {at}")),
            ),
            (Verdict::Fails(at) | Verdict::Unknown(at), _) => {
                if self.pending.is_none() {
                    self.pending = Some(
                        Witness::new(format!("{row} undecided at {}", shown()))
                            .with_line(format!("evidence {evidence}"))
                            .with_line(format!("at {at}")),
                    );
                }
                None
            }
        }
    }
}

/// Checks every conformance row over the sample: reflexivity, transitivity, top,
/// the conjunction rows and the universal-implication rows. The first
/// violation is returned as a counterexample.
pub fn validate_frame<F: EvidencedFrame + ?Sized>(f: &F, sample: &FrameSample<F::Prop, F::Ev>) -> CheckResult {
    run_rows(f, sample, &mut None)
}

/// [`validate_frame`], also returning every instance whose conclusion held.
pub fn validate_frame_passing<F: EvidencedFrame + ?Sized>(
    f: &F,
    sample: &FrameSample<F::Prop, F::Ev>,
) -> (CheckResult, Vec<PassedInstance<F::Prop, F::Ev>>) {
    let mut passed = Some(Vec::new());
    let r = run_rows(f, sample, &mut passed);
    (r, passed.unwrap_or_default())
}

fn run_rows<F: EvidencedFrame + ?Sized>(
    f: &F,
    sample: &FrameSample<F::Prop, F::Ev>,
    passed: &mut Option<Vec<PassedInstance<F::Prop, F::Ev>>>,
) -> CheckResult {
    let mut rc = RowChecker {
        f,
        memo: HashMap::new(),
        instances: 0,
        pending: None,
        passed: passed.take(),
    };
    let props = &sample.props;
    let evs = &sample.evs;
    let sp = |p: &F::Prop| f.show_prop(p);
    let top = f.top();
    macro_rules! check {
        ($e:expr) => {
            if let Some(w) = $e {
                return CheckResult::Counterexample(w);
            }
        };
    }
    let e_id = f.e_id();
    for p in props {
        check!(rc.instance("reflexivity", || sp(p), &[], (p.clone(), e_id.clone(), p.clone())));
    }
    for p1 in props {
        for p2 in props {
            for p3 in props {
                for e1 in evs {
                    if matches!(rc.rel(p1, e1, p2), Verdict::Fails(_)) {
                        continue;
                    }
                    for e2 in evs {
                        check!(rc.instance(
                            "transitivity",
                            || format!("({}, {}, {}) with ({}, {})", sp(p1), sp(p2), sp(p3), f.show_ev(e1), f.show_ev(e2)),
                            &[(p1.clone(), e1.clone(), p2.clone()), (p2.clone(), e2.clone(), p3.clone())],
                            (p1.clone(), f.compose(e1, e2), p3.clone()),
                        ));
                    }
                }
            }
        }
    }
    let e_top = f.e_top();
    for p in props {
        check!(rc.instance("top", || sp(p), &[], (p.clone(), e_top.clone(), top.clone())));
    }
    for p in props {
        for q1 in props {
            for q2 in props {
                let conj = f.and(q1, q2);
                for e1 in evs {
                    if matches!(rc.rel(p, e1, q1), Verdict::Fails(_)) {
                        continue;
                    }
                    for e2 in evs {
                        check!(rc.instance(
                            "conjunction pairing",
                            || format!("({}, {}, {}) with ({}, {})", sp(p), sp(q1), sp(q2), f.show_ev(e1), f.show_ev(e2)),
                            &[(p.clone(), e1.clone(), q1.clone()), (p.clone(), e2.clone(), q2.clone())],
                            (p.clone(), f.pair(e1, e2), conj.clone()),
                        ));
                    }
                }
            }
        }
    }
    let (e_fst, e_snd) = (f.e_fst(), f.e_snd());
    for p1 in props {
        for p2 in props {
            let conj = f.and(p1, p2);
            let shown = || format!("({}, {})", sp(p1), sp(p2));
            check!(rc.instance("conjunction first projection", shown, &[], (conj.clone(), e_fst.clone(), p1.clone())));
            check!(rc.instance("conjunction second projection", shown, &[], (conj, e_snd.clone(), p2.clone())));
        }
    }
    let subsets = bounded_subsets(props, sample.psi_cap);
    let show_set = |s: &[F::Prop]| format!("{{{}}}", s.iter().map(sp).collect::<Vec<_>>().join(", "));
    for p1 in props {
        for p2 in props {
            let conj = f.and(p1, p2);
            for psis in &subsets {
                let target = f.uimp(p2, psis);
                for e in evs {
                    if psis.iter().any(|q| matches!(rc.rel(&conj, e, q), Verdict::Fails(_))) {
                        continue;
                    }
                    let premises: Vec<_> = psis.iter().map(|q| (conj.clone(), e.clone(), q.clone())).collect();
                    check!(rc.instance(
                        "universal implication (lambda)",
                        || format!("({}, {}, {}) with {}", sp(p1), sp(p2), show_set(psis), f.show_ev(e)),
                        &premises,
                        (p1.clone(), f.lam(e), target.clone()),
                    ));
                }
            }
        }
    }
    let e_eval = f.e_eval();
    for p in props {
        for psis in &subsets {
            let ante = f.and(&f.uimp(p, psis), p);
            for q in psis {
                check!(rc.instance(
                    "universal implication (eval)",
                    || format!("({}, {}, {})", sp(p), show_set(psis), sp(q)),
                    &[],
                    (ante.clone(), e_eval.clone(), q.clone()),
                ));
            }
        }
    }
    *passed = rc.passed.take();
    if let Some(w) = rc.pending {
        return CheckResult::Inconclusive(w);
    }
    CheckResult::Verified(Witness::new(format!(
        "all rows hold: {} instances over {} propositions, {} evidences, |Ψ| ≤ {}",
        rc.instances,
        props.len(),
        evs.len(),
        sample.psi_cap
    ))
    .with_line(format!(
        "constructs: id = {}, top = {}, fst = {}, snd = {}, eval = {}",
        f.show_ev(&f.e_id()),
        f.show_ev(&f.e_top()),
        f.show_ev(&f.e_fst()),
        f.show_ev(&f.e_snd()),
        f.show_ev(&f.e_eval())
    ))
    .with_lines(evs.first().map(|e| {
        format!(
            "e.g. compose(e, e) = {}, pair(e, e) = {}, lam(e) = {} for e = {}",
            f.show_ev(&f.compose(e, e)),
            f.show_ev(&f.pair(e, e)),
            f.show_ev(&f.lam(e)),
            f.show_ev(e)
        )
    })))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FrameError {
    #[error("algebra {0} fails validation: {1}")]
    InvalidAlgebra(String, String),
    #[error("too many propositions ({0}); finite frames support at most 16")]
    TooLarge(usize),
    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },
    #[error("missing {0}")]
    Missing(String),
    #[error("frame file: {0}")]
    Format(String),
}

/// Bit set of propositions (indices below 64).
pub type PropSet = u64;

pub fn mask_of(items: &[usize]) -> PropSet {
    items.iter().fold(0, |m, &i| m | (1u64 << i))
}

pub fn mask_items(mask: PropSet) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask & (1u64 << i) != 0)
}

/// A frame with finitely many propositions and evidences, every construct
/// and connective given by a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteFrame {
    name: String,
    props: Vec<String>,
    evs: Vec<String>,
    rel: Vec<bool>,
    e_id: usize,
    e_top: usize,
    e_fst: usize,
    e_snd: usize,
    e_eval: usize,
    compose: Vec<Vec<usize>>,
    pair: Vec<Vec<usize>>,
    lam: Vec<usize>,
    top: usize,
    and: Vec<Vec<usize>>,
    /// Indexed by `φ * 2^|Φ| + mask(Ψ)`.
    uimp: Vec<usize>,
    algebra: Option<HeytingAlgebra>,
}

impl FiniteFrame {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> Option<&HeytingAlgebra> {
        self.algebra.as_ref()
    }

    pub fn num_props(&self) -> usize {
        self.props.len()
    }

    pub fn num_evs(&self) -> usize {
        self.evs.len()
    }

    pub fn props(&self) -> std::ops::Range<usize> {
        0..self.props.len()
    }

    pub fn evs(&self) -> std::ops::Range<usize> {
        0..self.evs.len()
    }

    pub fn prop_name(&self, p: usize) -> &str {
        &self.props[p]
    }

    pub fn prop(&self, name: &str) -> Result<usize, FrameError> {
        self.props.iter().position(|x| x == name).ok_or_else(|| FrameError::Unknown {
            kind: "proposition",
            name: name.to_string(),
        })
    }

    pub fn ev_name(&self, e: usize) -> &str {
        &self.evs[e]
    }

    #[inline]
    pub fn rel(&self, phi: usize, e: usize, psi: usize) -> bool {
        let n = self.props.len();
        self.rel[(phi * self.evs.len() + e) * n + psi]
    }

    #[inline]
    pub fn uimp_mask(&self, phi: usize, mask: PropSet) -> usize {
        self.uimp[(phi << self.props.len()) | mask as usize]
    }

    pub fn set_uimp(&mut self, phi: usize, mask: PropSet, value: usize) {
        let n = self.props.len();
        self.uimp[(phi << n) | mask as usize] = value;
    }

    /// Replaces the whole universal-implication table.
    pub fn map_uimp(mut self, g: impl Fn(&FiniteFrame, usize, PropSet) -> usize) -> FiniteFrame {
        let n = self.props.len();
        for phi in 0..n {
            for mask in 0..(1u64 << n) {
                let v = g(&self, phi, mask);
                self.set_uimp(phi, mask, v);
            }
        }
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn all_props_mask(&self) -> PropSet {
        (1u64 << self.props.len()) - 1
    }

    /// `φ ≤ ψ` in the induced preorder: some evidence relates them.
    pub fn leq(&self, phi: usize, psi: usize) -> bool {
        self.evs().any(|e| self.rel(phi, e, psi))
    }

    pub fn evidence_for(&self, phi: usize, psi: usize) -> Option<usize> {
        self.evs().find(|&e| self.rel(phi, e, psi))
    }

    pub fn evidenceable(&self, phi: usize) -> bool {
        self.leq(self.top, phi)
    }

    pub fn imp1(&self, a: usize, b: usize) -> usize {
        self.uimp_mask(a, 1u64 << b)
    }

    pub fn iff1(&self, a: usize, b: usize) -> usize {
        self.and[self.imp1(a, b)][self.imp1(b, a)]
    }

    pub fn and1(&self, a: usize, b: usize) -> usize {
        self.and[a][b]
    }

    pub fn big_pi_mask(&self, mask: PropSet) -> usize {
        self.uimp_mask(self.top, mask)
    }

    pub fn bottom1(&self) -> usize {
        self.big_pi_mask(self.all_props_mask())
    }

    /// `∏{ ∏{ψ ⊃ φ | ψ ∈ Ψ} ⊃ φ | φ ∈ Φ }`.
    pub fn big_coprod_mask(&self, mask: PropSet) -> usize {
        let mut outer: PropSet = 0;
        for phi in self.props() {
            let inner: PropSet = mask_items(mask).fold(0, |m, psi| m | (1u64 << self.imp1(psi, phi)));
            outer |= 1u64 << self.imp1(self.big_pi_mask(inner), phi);
        }
        self.big_pi_mask(outer)
    }

    /// Equivalence `φ ⊣⊢ ψ` in the induced preorder.
    pub fn equiv(&self, a: usize, b: usize) -> bool {
        self.leq(a, b) && self.leq(b, a)
    }

    pub fn top1(&self) -> usize {
        self.top
    }

    /// Exhaustive sample: every proposition, every evidence, every `Ψ ⊆ Φ`.
    pub fn full_sample(&self) -> FrameSample<usize, usize> {
        FrameSample {
            props: self.props().collect(),
            evs: self.evs().collect(),
            psi_cap: self.props.len(),
        }
    }

    /// Parses a frame file: `heyting <ALGEBRA>` or TOML tables.
    pub fn from_file_text(text: &str) -> Result<FiniteFrame, FrameError> {
        let trimmed = text.trim();
        if let Some(rest) = trimmed.strip_prefix("heyting") {
            let alg = HeytingAlgebra::from_file_text(rest.trim())
                .map_err(|e| FrameError::Format(e.to_string()))?;
            return heyting_frame(&alg);
        }
        parse_table_frame(text)
    }
}

/// The degenerate frame of a Heyting algebra: `E = {⋆}` and `φ ⊢⋆ ψ` iff `φ ≤ ψ`.
pub fn heyting_frame(h: &HeytingAlgebra) -> Result<FiniteFrame, FrameError> {
    if let CheckResult::Counterexample(w) = validate_algebra(h) {
        return Err(FrameError::InvalidAlgebra(h.name().to_string(), w.label));
    }
    let n = h.len();
    if n > 16 {
        return Err(FrameError::TooLarge(n));
    }
    let mut rel = vec![false; n * n];
    for a in h.elements() {
        for b in h.elements() {
            rel[a * n + b] = h.leq(a, b);
        }
    }
    let mut uimp = vec![0; n << n];
    for phi in 0..n {
        for mask in 0..(1usize << n) {
            let m = h.big_meet(mask_items(mask as u64)).expect("mask within carrier");
            uimp[(phi << n) | mask] = h.imp(phi, m);
        }
    }
    Ok(FiniteFrame {
        name: format!("heyting {}", h.name()),
        props: h.elements().map(|e| h.elem_name(e).to_string()).collect(),
        evs: vec!["*".into()],
        rel,
        e_id: 0,
        e_top: 0,
        e_fst: 0,
        e_snd: 0,
        e_eval: 0,
        compose: vec![vec![0]],
        pair: vec![vec![0]],
        lam: vec![0],
        top: h.top(),
        and: (0..n).map(|a| (0..n).map(|b| h.meet(a, b)).collect()).collect(),
        uimp,
        algebra: Some(h.clone()),
    })
}

impl EvidencedFrame for FiniteFrame {
    type Prop = usize;
    type Ev = usize;

    fn show_prop(&self, p: &usize) -> String {
        self.props[*p].clone()
    }

    fn show_ev(&self, e: &usize) -> String {
        self.evs[*e].clone()
    }

    fn entails(&self, phi: &usize, e: &usize, psi: &usize) -> Verdict {
        if self.rel(*phi, *e, *psi) {
            Verdict::Holds
        } else {
            Verdict::Fails(format!("{} ⊬{} {}", self.props[*phi], self.evs[*e], self.props[*psi]))
        }
    }

    fn top(&self) -> usize {
        self.top
    }

    fn and(&self, a: &usize, b: &usize) -> usize {
        self.and[*a][*b]
    }

    fn uimp(&self, phi: &usize, psis: &[usize]) -> usize {
        self.uimp_mask(*phi, mask_of(psis))
    }

    fn bottom(&self) -> usize {
        self.bottom1()
    }

    fn big_coprod(&self, psis: &[usize]) -> usize {
        self.big_coprod_mask(mask_of(psis))
    }

    fn e_id(&self) -> usize {
        self.e_id
    }

    fn compose(&self, e1: &usize, e2: &usize) -> usize {
        self.compose[*e1][*e2]
    }

    fn e_top(&self) -> usize {
        self.e_top
    }

    fn pair(&self, e1: &usize, e2: &usize) -> usize {
        self.pair[*e1][*e2]
    }

    fn e_fst(&self) -> usize {
        self.e_fst
    }

    fn e_snd(&self) -> usize {
        self.e_snd
    }

    fn lam(&self, e: &usize) -> usize {
        self.lam[*e]
    }

    fn e_eval(&self) -> usize {
        self.e_eval
    }
}

#[derive(Deserialize)]
struct TableFile {
    name: Option<String>,
    props: Vec<String>,
    evs: Vec<String>,
    /// Triples `[φ, e, ψ]` for which the relation holds.
    relation: Vec<(String, String, String)>,
    e_id: String,
    e_top: String,
    e_fst: String,
    e_snd: String,
    e_eval: String,
    compose: Vec<(String, String, String)>,
    pair: Vec<(String, String, String)>,
    lam: Vec<(String, String)>,
    top: String,
    and: Vec<(String, String, String)>,
    uimp: Vec<(String, Vec<String>, String)>,
}

fn parse_table_frame(text: &str) -> Result<FiniteFrame, FrameError> {
    let f: TableFile = toml::from_str(text).map_err(|e| FrameError::Format(e.to_string()))?;
    let n = f.props.len();
    if n > 16 {
        return Err(FrameError::TooLarge(n));
    }
    let m = f.evs.len();
    let p = |s: &str| {
        f.props.iter().position(|x| x == s).ok_or_else(|| FrameError::Unknown {
            kind: "proposition",
            name: s.to_string(),
        })
    };
    let e = |s: &str| {
        f.evs.iter().position(|x| x == s).ok_or_else(|| FrameError::Unknown {
            kind: "evidence",
            name: s.to_string(),
        })
    };
    let mut rel = vec![false; n * m * n];
    for (a, ev, b) in &f.relation {
        rel[(p(a)? * m + e(ev)?) * n + p(b)?] = true;
    }
    let mut compose = vec![vec![usize::MAX; m]; m];
    for (a, b, r) in &f.compose {
        compose[e(a)?][e(b)?] = e(r)?;
    }
    let mut pair = vec![vec![usize::MAX; m]; m];
    for (a, b, r) in &f.pair {
        pair[e(a)?][e(b)?] = e(r)?;
    }
    let mut lam = vec![usize::MAX; m];
    for (a, r) in &f.lam {
        lam[e(a)?] = e(r)?;
    }
    let mut and = vec![vec![usize::MAX; n]; n];
    for (a, b, r) in &f.and {
        and[p(a)?][p(b)?] = p(r)?;
    }
    let mut uimp = vec![usize::MAX; n << n];
    for (a, set, r) in &f.uimp {
        let items = set.iter().map(|s| p(s)).collect::<Result<Vec<_>, _>>()?;
        uimp[(p(a)? << n) | mask_of(&items) as usize] = p(r)?;
    }
    if compose.iter().flatten().any(|&x| x == usize::MAX) {
        return Err(FrameError::Missing("compose entries".into()));
    }
    if pair.iter().flatten().any(|&x| x == usize::MAX) {
        return Err(FrameError::Missing("pair entries".into()));
    }
    if lam.contains(&usize::MAX) {
        return Err(FrameError::Missing("lam entries".into()));
    }
    if and.iter().flatten().any(|&x| x == usize::MAX) {
        return Err(FrameError::Missing("and entries".into()));
    }
    if uimp.contains(&usize::MAX) {
        return Err(FrameError::Missing("uimp entries".into()));
    }
    Ok(FiniteFrame {
        name: f.name.clone().unwrap_or_else(|| "table frame".into()),
        rel,
        e_id: e(&f.e_id)?,
        e_top: e(&f.e_top)?,
        e_fst: e(&f.e_fst)?,
        e_snd: e(&f.e_snd)?,
        e_eval: e(&f.e_eval)?,
        compose,
        pair,
        lam,
        top: p(&f.top)?,
        and,
        uimp,
        props: f.props,
        evs: f.evs,
        algebra: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heyting::Builtin;

    fn frame(b: Builtin) -> FiniteFrame {
        heyting_frame(&HeytingAlgebra::builtin(b)).unwrap()
    }

    #[test]
    fn heyting_frame_basics() {
        let f = frame(Builtin::Bool2);
        assert!(f.entails(&0, &0, &1).holds());
        assert!(!f.entails(&1, &0, &0).holds());
        let c = frame(Builtin::Chain3);
        let (z, h) = (c.prop("0").unwrap(), c.prop("h").unwrap());
        assert_eq!(c.uimp(&h, &[z]), z);
        for p in c.props() {
            assert_eq!(c.evidenceable(p), p == c.top1());
        }
    }

    #[test]
    fn builtin_frames_validate() {
        for b in Builtin::ALL {
            let f = frame(b);
            let r = validate_frame(&f, &f.full_sample());
            assert!(r.is_verified(), "{r}");
        }
    }

    #[test]
    fn broken_uimp_is_caught_at_universal_implication() {
        let f = frame(Builtin::Chain3).map_uimp(|fr, phi, mask| {
            let h = fr.algebra().unwrap();
            h.join(phi, h.big_meet(mask_items(mask)).unwrap())
        });
        match validate_frame(&f, &f.full_sample()) {
            CheckResult::Counterexample(w) => assert!(w.label.starts_with("universal implication"), "{w}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn derived_connectives() {
        let c = frame(Builtin::Chain3);
        let (z, h, one) = (0, 1, 2);
        assert_eq!(derived(&c, DerivedOp::Bottom, &[]), Some(z));
        assert_eq!(derived(&c, DerivedOp::Iff, &[h, h]), Some(one));
        assert_eq!(c.big_coprod(&[z, h]), h);
        for b in Builtin::ALL {
            let f = frame(b);
            let alg = f.algebra().unwrap().clone();
            for mask in 0..=f.all_props_mask() {
                assert_eq!(f.big_coprod_mask(mask), alg.big_join(mask_items(mask)).unwrap());
            }
        }
    }

    #[test]
    fn deduction_on_trivial_frame() {
        let c = frame(Builtin::Chain3);
        let (h, one) = (1, 2);
        let (ev, r) = deduction_forward(&c, &one, &one, &0, &0);
        assert_eq!(ev, 0);
        assert!(r.is_verified());
        let (_, r) = deduction_forward(&c, &one, &h, &0, &0);
        assert!(r.is_counterexample());
    }

    #[test]
    fn subsets_are_capped() {
        let s = bounded_subsets(&[1, 2, 3], 2);
        assert_eq!(s.len(), 1 + 3 + 3);
        assert_eq!(s[0], Vec::<i32>::new());
        assert_eq!(s[4], vec![1, 2]);
    }

    #[test]
    fn frame_files() {
        let f = FiniteFrame::from_file_text("heyting DIAMOND4").unwrap();
        assert_eq!(f.num_props(), 4);
        let text = r#"
            name = "two"
            props = ["f", "t"]
            evs = ["u"]
            relation = [["f", "u", "f"], ["f", "u", "t"], ["t", "u", "t"]]
            e_id = "u"
            e_top = "u"
            e_fst = "u"
            e_snd = "u"
            e_eval = "u"
            compose = [["u", "u", "u"]]
            pair = [["u", "u", "u"]]
            lam = [["u", "u"]]
            top = "t"
            and = [["f", "f", "f"], ["f", "t", "f"], ["t", "f", "f"], ["t", "t", "t"]]
            uimp = [
                ["f", [], "t"], ["f", ["f"], "t"], ["f", ["t"], "t"], ["f", ["f", "t"], "t"],
                ["t", [], "t"], ["t", ["f"], "f"], ["t", ["t"], "t"], ["t", ["f", "t"], "f"],
            ]
        "#;
        let t = FiniteFrame::from_file_text(text).unwrap();
        assert!(validate_frame(&t, &t.full_sample()).is_verified());
        assert!(matches!(
            FiniteFrame::from_file_text(&text.replace("lam = [[\"u\", \"u\"]]", "lam = []")),
            Err(FrameError::Missing(_))
        ));
    }
}
