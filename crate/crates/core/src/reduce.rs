//! Budgeted normal-order reduction and term enumeration.
//!
//! Rules (one step each):
//!
//! ```text
//! K a b     -> a
//! S a b c   -> a c (b c)
//! P a b c   -> c a b
//! FST a     -> a K
//! SND a     -> a (K (S K K))
//! ```
//!
//! `FST (P a b)` therefore reaches `a` in three steps. `CC`, `Z0` and captured
//! continuations are inert here; they only act in the stack machine.

use thiserror::Error;

use crate::term::{Atom, Term, K};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ReductionOutcome {
    /// Normal form reached.
    Value(Term),
    /// The budget ran out; carries the number of steps consumed (the budget).
    OutOfBudget(u64),
}

impl ReductionOutcome {
    pub fn value(&self) -> Option<&Term> {
        match self {
            ReductionOutcome::Value(t) => Some(t),
            ReductionOutcome::OutOfBudget(_) => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("term `{0}` is not closed")]
    NotClosed(Term),
}

/// Step counter shared across nested reductions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fuel {
    pub used: u64,
    pub limit: u64,
}

impl Fuel {
    pub fn new(limit: u64) -> Self {
        Fuel { used: 0, limit }
    }

    /// Takes one step; `false` when the budget is already spent.
    #[inline]
    pub fn tick(&mut self) -> bool {
        if self.used >= self.limit {
            false
        } else {
            self.used += 1;
            true
        }
    }
}

/// `K (S K K)`: the selector used by `SND`.
pub(crate) fn snd_selector() -> Term {
    Term::app(K, Term::identity())
}

/// Fires one pure rule on a head with its argument stack (top of stack is
/// the first argument). Returns `false` if no rule applies.
pub(crate) fn fire_pure(head: &mut Term, stack: &mut Vec<Term>) -> bool {
    let Term::Atom(a) = head else { return false };
    let n = stack.len();
    match a {
        Atom::K if n >= 2 => {
            let x = stack.pop().unwrap();
            stack.pop();
            *head = x;
        }
        Atom::S if n >= 3 => {
            let x = stack.pop().unwrap();
            let y = stack.pop().unwrap();
            let z = stack.pop().unwrap();
            stack.push(Term::app(y, z.clone()));
            stack.push(z);
            *head = x;
        }
        Atom::Pair if n >= 3 => {
            let x = stack.pop().unwrap();
            let y = stack.pop().unwrap();
            let z = stack.pop().unwrap();
            stack.push(y);
            stack.push(x);
            *head = z;
        }
        Atom::Fst if n >= 1 => {
            let x = stack.pop().unwrap();
            stack.push(K);
            *head = x;
        }
        Atom::Snd if n >= 1 => {
            let x = stack.pop().unwrap();
            stack.push(snd_selector());
            *head = x;
        }
        _ => return false,
    }
    true
}

/// Weak-head phase: unwinds the spine and fires head rules until none applies.
/// Returns the head and its arguments in application order.
fn whnf(t: &Term, fuel: &mut Fuel) -> Option<(Term, Vec<Term>)> {
    let mut head = t.clone();
    let mut stack: Vec<Term> = Vec::new();
    loop {
        if let Term::App(f, x) = &head {
            stack.push((**x).clone());
            head = (**f).clone();
            continue;
        }
        if !rule_applies(&head, stack.len()) {
            stack.reverse();
            return Some((head, stack));
        }
        if !fuel.tick() {
            return None;
        }
        fire_pure(&mut head, &mut stack);
    }
}

fn rule_applies(head: &Term, n: usize) -> bool {
    matches!(
        (head, n),
        (Term::Atom(Atom::K), 2..)
            | (Term::Atom(Atom::S), 3..)
            | (Term::Atom(Atom::Pair), 3..)
            | (Term::Atom(Atom::Fst), 1..)
            | (Term::Atom(Atom::Snd), 1..)
    )
}

/// Normal-order normalization against a shared step counter.
pub fn normalize(t: &Term, fuel: &mut Fuel) -> Option<Term> {
    let (head, args) = whnf(t, fuel)?;
    let mut out = head;
    for a in &args {
        out = Term::app(out, normalize(a, fuel)?);
    }
    Some(out)
}

/// Deterministic budgeted reduction of a closed term to normal form.
pub fn reduce(t: &Term, budget: u64) -> Result<ReductionOutcome, ReduceError> {
    reduce_counted(t, budget).map(|(o, _)| o)
}

/// Like [`reduce`], also reporting the steps consumed.
pub fn reduce_counted(t: &Term, budget: u64) -> Result<(ReductionOutcome, u64), ReduceError> {
    if !t.is_closed() {
        return Err(ReduceError::NotClosed(t.clone()));
    }
    let mut fuel = Fuel::new(budget);
    Ok(match normalize(t, &mut fuel) {
        Some(v) => (ReductionOutcome::Value(v), fuel.used),
        None => (ReductionOutcome::OutOfBudget(budget), fuel.used),
    })
}

pub fn is_normal(t: &Term) -> bool {
    let mut fuel = Fuel::new(0);
    normalize(t, &mut fuel).is_some()
}

/// All closed application trees over `basis` with at most `max_leaves`
/// leaves: ordered by size, then by left subtree size, then lexicographically
/// by (left, right) in enumeration order. Basis order is preserved at size one.
pub fn enumerate_terms(basis: &[Atom], max_leaves: usize) -> Vec<Term> {
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new()];
    let mut atoms: Vec<Atom> = Vec::new();
    for a in basis {
        if !atoms.contains(a) {
            atoms.push(*a);
        }
    }
    for n in 1..=max_leaves {
        let mut level = Vec::new();
        if n == 1 {
            level.extend(atoms.iter().map(|a| Term::Atom(*a)));
        } else {
            for l in 1..n {
                for left in &by_size[l] {
                    for right in &by_size[n - l] {
                        level.push(Term::app(left.clone(), right.clone()));
                    }
                }
            }
        }
        by_size.push(level);
    }
    by_size.into_iter().flatten().collect()
}

/// Enumerated terms that are already in normal form: the code universe.
pub fn normal_universe(basis: &[Atom], max_leaves: usize) -> Vec<Term> {
    enumerate_terms(basis, max_leaves)
        .into_iter()
        .filter(is_normal)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{abstract_var, parse_term, S};

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn omega() -> Term {
        p("S (S K K) (S K K)")
    }

    #[test]
    fn basic_rules() {
        assert_eq!(reduce(&p("K S K"), 10).unwrap(), ReductionOutcome::Value(S));
        assert_eq!(reduce(&p("S K K S"), 10).unwrap(), ReductionOutcome::Value(S));
        assert_eq!(reduce_counted(&p("S K K S"), 10).unwrap().1, 2);
        assert_eq!(reduce(&p("FST (P K S)"), 10).unwrap(), ReductionOutcome::Value(K));
        assert_eq!(reduce(&p("SND (P K S)"), 10).unwrap(), ReductionOutcome::Value(S));
    }

    #[test]
    fn omega_exhausts_budget() {
        let t = Term::app(omega(), omega());
        assert_eq!(reduce(&t, 1000).unwrap(), ReductionOutcome::OutOfBudget(1000));
    }

    #[test]
    fn abstraction_oracle() {
        let f = abstract_var("x", &p("x x"));
        assert_eq!(
            reduce(&Term::app(f, K), 100).unwrap(),
            ReductionOutcome::Value(p("K K"))
        );
    }

    #[test]
    fn rejects_open_terms() {
        assert!(matches!(reduce(&p("S x"), 5), Err(ReduceError::NotClosed(_))));
    }

    #[test]
    fn inert_atoms_and_partial_applications_are_values() {
        for s in ["CC K", "Z0 S K", "S K", "P K", "K (S K)"] {
            assert!(is_normal(&p(s)), "{s}");
        }
        assert!(!is_normal(&p("K (K S K)")));
    }

    #[test]
    fn zero_budget_keeps_normal_forms() {
        assert_eq!(reduce(&p("S K"), 0).unwrap(), ReductionOutcome::Value(p("S K")));
        assert_eq!(reduce(&p("K S K"), 0).unwrap(), ReductionOutcome::OutOfBudget(0));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_terms(&[Atom::S, Atom::K], 1), vec![S, K]);
        assert_eq!(
            enumerate_terms(&[Atom::S, Atom::K], 2),
            vec![S, K, p("S S"), p("S K"), p("K S"), p("K K")]
        );
        assert_eq!(enumerate_terms(&[Atom::S, Atom::K], 3).len(), 22);
    }
}
