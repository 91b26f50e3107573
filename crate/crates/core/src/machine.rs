//! Stack machine with call/cc.
//!
//! A process is `⟨head | stack⟩` plus the return continuation that receives
//! the final value. Transitions, each costing one unit of fuel:
//!
//! ```text
//! ⟨M N | σ⟩           -> ⟨M | N·σ⟩
//! ⟨K | a·b·σ⟩         -> ⟨a | σ⟩              (and the S, P, FST, SND rules)
//! ⟨CC | c·σ⟩          -> ⟨c | Cont(σ, ρ)·σ⟩   where ρ is the current return
//! ⟨Cont(σ, ρ) | c·σ'⟩ -> ⟨c | σ⟩              with return ρ
//! ```
//!
//! When no rule applies and a return continuation `k` is set, the value (the
//! head applied to the stack, normalized) is handed over: `⟨k | v⟩` with no
//! return. Without a return continuation the process accepts iff it is
//! `⟨Z0 | ε⟩`.

use std::fmt;

use crate::reduce::{fire_pure, normalize, Fuel};
use crate::term::{Atom, Term};

/// Where the final value of a process goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ret {
    None,
    To(Term),
    /// A symbolic continuation: the run stops when a value reaches it.
    /// `CC` may capture it; captured copies are marked with [`HOLE`].
    Hole,
}

/// Variable name marking the symbolic continuation inside captured stacks.
pub const HOLE: &str = "κ";

impl Ret {
    fn from_captured(r: &Option<Term>) -> Ret {
        match r {
            Some(Term::Var(v)) if &**v == HOLE => Ret::Hole,
            Some(k) => Ret::To(k.clone()),
            None => Ret::None,
        }
    }

    fn to_captured(&self) -> Option<Term> {
        match self {
            Ret::None => None,
            Ret::To(k) => Some(k.clone()),
            Ret::Hole => Some(Term::var(HOLE)),
        }
    }
}

/// Whether `t` mentions the symbolic continuation (possibly inside captures).
pub fn mentions_hole(t: &Term) -> bool {
    match t {
        Term::Var(v) => &**v == HOLE,
        Term::Atom(_) => false,
        Term::App(f, x) => mentions_hole(f) || mentions_hole(x),
        Term::Cont(c) => c.stack.iter().any(mentions_hole) || c.ret.as_ref().is_some_and(mentions_hole),
    }
}

/// Replaces the symbolic continuation by `k`, inside captures too.
pub fn fill_hole(t: &Term, k: &Term) -> Term {
    match t {
        Term::Var(v) if &**v == HOLE => k.clone(),
        Term::App(f, x) => Term::app(fill_hole(f, k), fill_hole(x, k)),
        Term::Cont(c) if mentions_hole(t) => Term::cont(
            c.stack.iter().map(|s| fill_hole(s, k)).collect(),
            c.ret.as_ref().map(|r| fill_hole(r, k)),
        ),
        _ => t.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub head: Term,
    /// Top of stack is the last element.
    pub stack: Vec<Term>,
    pub ret: Ret,
}

impl Process {
    pub fn new(head: Term, ret: Ret) -> Self {
        Process {
            head,
            stack: Vec::new(),
            ret,
        }
    }

    /// `⟨k | a⟩` with no return continuation.
    pub fn feed(k: &Term, a: &Term) -> Self {
        Process {
            head: k.clone(),
            stack: vec![a.clone()],
            ret: Ret::None,
        }
    }

    /// The head applied to the stack, as one term.
    pub fn as_term(&self) -> Term {
        Term::apply_all(self.head.clone(), self.stack.iter().rev().cloned())
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{} ∣", self.head)?;
        if self.stack.is_empty() {
            f.write_str(" ε")?;
        }
        for (i, t) in self.stack.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" ·")?;
            }
            match t {
                Term::App(..) => write!(f, " ({t})")?,
                _ => write!(f, " {t}")?,
            }
        }
        f.write_str("⟩")?;
        match &self.ret {
            Ret::None => Ok(()),
            Ret::To(k) => write!(f, " ↦ {k}"),
            Ret::Hole => f.write_str(" ↦ ?"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Accept,
    Stuck(Process),
    OutOfFuel,
    /// Only with [`Ret::Hole`]: the value handed to the symbolic continuation.
    HandedToHole(Term),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub outcome: Outcome,
    pub steps: u64,
    /// Values handed to return continuations, in order.
    pub handed: Vec<Term>,
    pub trace: Vec<String>,
}

impl Run {
    pub fn accepted(&self) -> bool {
        self.outcome == Outcome::Accept
    }

    pub fn verdict(&self) -> &'static str {
        match self.outcome {
            Outcome::Accept => "accept",
            Outcome::Stuck(_) => "stuck",
            Outcome::OutOfFuel => "out of fuel",
            Outcome::HandedToHole(_) => "returned",
        }
    }
}

/// One transition. `Err` carries the terminal outcome; fuel is checked by the caller.
pub fn step(p: &mut Process, fuel: &mut Fuel, handed: &mut Vec<Term>) -> Result<(), Outcome> {
    if let Term::App(f, x) = &p.head {
        let (f, x) = ((**f).clone(), (**x).clone());
        p.stack.push(x);
        p.head = f;
        return Ok(());
    }
    if fire_pure(&mut p.head, &mut p.stack) {
        return Ok(());
    }
    match &p.head {
        Term::Atom(Atom::CC) if !p.stack.is_empty() => {
            let c = p.stack.pop().unwrap();
            let k = Term::cont(p.stack.clone(), p.ret.to_captured());
            p.stack.push(k);
            p.head = c;
            Ok(())
        }
        Term::Cont(cap) if !p.stack.is_empty() => {
            let c = p.stack.pop().unwrap();
            p.stack = cap.stack.clone();
            p.ret = Ret::from_captured(&cap.ret);
            p.head = c;
            Ok(())
        }
        _ => match std::mem::replace(&mut p.ret, Ret::None) {
            Ret::To(k) => {
                let v = normalize(&p.as_term(), fuel).ok_or(Outcome::OutOfFuel)?;
                handed.push(v.clone());
                p.head = k;
                p.stack = vec![v];
                Ok(())
            }
            Ret::Hole => {
                let v = normalize(&p.as_term(), fuel).ok_or(Outcome::OutOfFuel)?;
                Err(Outcome::HandedToHole(v))
            }
            Ret::None => {
                if p.head == Term::Atom(Atom::Zero) && p.stack.is_empty() {
                    Err(Outcome::Accept)
                } else {
                    Err(Outcome::Stuck(p.clone()))
                }
            }
        },
    }
}

/// Runs to a terminal state within `fuel` transitions.
pub fn run(p: Process, fuel: u64, traced: bool) -> Run {
    let mut p = p;
    let mut f = Fuel::new(fuel);
    let mut handed = Vec::new();
    let mut trace = Vec::new();
    loop {
        if traced {
            trace.push(p.to_string());
        }
        if !f.tick() {
            return Run {
                outcome: Outcome::OutOfFuel,
                steps: f.used,
                handed,
                trace,
            };
        }
        if let Err(outcome) = step(&mut p, &mut f, &mut handed) {
            if traced {
                trace.push(format!("⇒ {}", outcome_label(&outcome)));
            }
            return Run {
                outcome,
                steps: f.used,
                handed,
                trace,
            };
        }
    }
}

fn outcome_label(o: &Outcome) -> String {
    match o {
        Outcome::Accept => "accept".into(),
        Outcome::Stuck(p) => format!("stuck at {p}"),
        Outcome::OutOfFuel => "out of fuel".into(),
        Outcome::HandedToHole(v) => format!("returns {v}"),
    }
}

/// `k ⊥ a`: `⟨k | a⟩` accepts.
pub fn pole_run(k: &Term, a: &Term, fuel: u64, traced: bool) -> Run {
    run(Process::feed(k, a), fuel, traced)
}

/// `m ⊥ k`: the computation `m` returning into `k` accepts.
pub fn computation_run(m: &Term, k: &Term, fuel: u64, traced: bool) -> Run {
    run(Process::new(m.clone(), Ret::To(k.clone())), fuel, traced)
}

/// `throw_k`: the captured empty stack whose return continuation is `k`.
pub fn throw_to(k: &Term) -> Term {
    Term::cont(Vec::new(), Some(k.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{abstract_var, parse_term, K, S};

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn zero_k() -> Term {
        abstract_var("x", &Term::atom(Atom::Zero))
    }

    #[test]
    fn cc_and_throw_steps() {
        let c = p("K");
        let mut pr = Process {
            head: Term::atom(Atom::CC),
            stack: vec![S, c.clone()],
            ret: Ret::None,
        };
        let mut f = Fuel::new(10);
        step(&mut pr, &mut f, &mut Vec::new()).unwrap();
        assert_eq!(pr.head, c);
        assert_eq!(pr.stack, vec![S, Term::cont(vec![S], None)]);
        let mut pr = Process {
            head: Term::cont(vec![K], None),
            stack: vec![S, S, c.clone()],
            ret: Ret::None,
        };
        step(&mut pr, &mut f, &mut Vec::new()).unwrap();
        assert_eq!((pr.head.clone(), pr.stack.clone()), (c, vec![K]));
    }

    #[test]
    fn pole_tests() {
        assert!(pole_run(&zero_k(), &S, 100, false).accepted());
        assert!(matches!(pole_run(&K, &S, 100, false).outcome, Outcome::Stuck(_)));
        let omega = p("S (S K K) (S K K)");
        let loop_k = Term::app(omega.clone(), omega);
        assert_eq!(pole_run(&loop_k, &S, 1000, false).outcome, Outcome::OutOfFuel);
    }

    #[test]
    fn values_are_returned() {
        let r = computation_run(&p("K S K"), &zero_k(), 100, true);
        assert!(r.accepted());
        assert_eq!(r.handed, vec![S]);
        assert!(r.trace.last().unwrap().contains("accept"));
    }

    #[test]
    fn call_cc_escapes() {
        // CC (λt. t Z0 S) returning into the identity: the throw discards `S`.
        let body = abstract_var("t", &Term::apply_all(Term::var("t"), [Term::atom(Atom::Zero), S]));
        let m = Term::app(Term::atom(Atom::CC), body);
        let r = computation_run(&m, &Term::identity(), 100, false);
        assert_eq!(r.handed, vec![Term::atom(Atom::Zero)]);
        assert!(r.accepted());
    }

    #[test]
    fn hole_runs() {
        let r = run(Process::new(p("K S K"), Ret::Hole), 100, false);
        assert_eq!(r.outcome, Outcome::HandedToHole(S));
        // CC K: K receives throw_κ and returns it.
        let r = run(Process::new(p("CC K"), Ret::Hole), 100, false);
        let Outcome::HandedToHole(v) = r.outcome else { panic!() };
        assert!(mentions_hole(&v));
        assert_eq!(fill_hole(&v, &K), Term::app(K, throw_to(&K)));
        let r = run(Process::new(Term::app(throw_to(&zero_k()), S), Ret::Hole), 100, false);
        assert!(r.accepted());
    }
}
