//! Monadic combinatory algebras over closed terms, in two tiers.
//!
//! * Partiality tier (`M1`): `e·c` is the normal form of `e c` within the
//!   fuel budget; a value is empty, a singleton, or unknown when fuel runs out.
//!   `◇⟨x∈{a}⟩φ = φ(a)` and `◇⟨x∈∅⟩φ = 0`.
//! * Continuation tier (`Cps`): `e·c` is the computation `e c` run on the stack
//!   machine. `◇⟨x∈m⟩φ = ⨅_k ((⨅_a φ(a) ⊐ k ⊥ a) ⊐ m ⊥ k)` with `k` ranging
//!   over every map from values to results. The machine runs `m` once against
//!   a symbolic continuation: if `m` accepts or gets stuck on its own the
//!   answer does not depend on `k`; if it hands a value `v` over, the meet is
//!   attained at `k = φ` and equals `φ(v)`. Values that mention the symbolic
//!   continuation itself fall back to the term pool.
//!
//! Truth values live in the two-element algebra; budget exhaustion makes a
//! judgment unknown rather than false.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::Deserialize;
use thiserror::Error;

use crate::check::{CheckResult, Witness};
use crate::frame::{EvidencedFrame, FrameSample, Premise, Verdict};
use crate::heyting::{Builtin, Elem, HeytingAlgebra, Truth};
use crate::machine::{fill_hole, mentions_hole, pole_run, run, throw_to, Outcome, Process, Ret};
use crate::reduce::{enumerate_terms, normal_universe, normalize, Fuel};
use crate::term::{abstract_var, abstract_vars, parse_term, Atom, Term, K, S};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum McaError {
    #[error("expression is open: variable {0}")]
    Open(String),
    #[error("monadic value from the {found} tier used with the {expected} tier")]
    TierMismatch { expected: Tier, found: Tier },
    #[error("bounds: {0}")]
    Bounds(String),
    #[error("proposition file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    M1,
    Cps,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::M1 => "M1",
            Tier::Cps => "CPS",
        })
    }
}

/// The finite universe, budgets and caps every bounded judgment is relative to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounds {
    pub basis: Vec<Atom>,
    pub max_leaves: usize,
    pub fuel: u64,
    pub pool_basis: Vec<Atom>,
    pub pool_leaves: usize,
    pub psi_cap: usize,
}

impl Bounds {
    /// Universe over `{S, K}` up to `leaves`, fuel `10⁴`, continuation pool
    /// over `{S, K, Z0}` up to 3 leaves, `|Ψ| ≤ 3`.
    pub fn desk(leaves: usize) -> Bounds {
        Bounds {
            basis: vec![Atom::S, Atom::K],
            max_leaves: leaves,
            fuel: 10_000,
            pool_basis: vec![Atom::S, Atom::K, Atom::Zero],
            pool_leaves: 3,
            psi_cap: 3,
        }
    }
}

fn show_basis(b: &[Atom]) -> String {
    b.iter().map(|a| a.name()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "basis={} leaves={} fuel={} pool_basis={} pool={} psi={}",
            show_basis(&self.basis),
            self.max_leaves,
            self.fuel,
            show_basis(&self.pool_basis),
            self.pool_leaves,
            self.psi_cap
        )
    }
}

impl FromStr for Bounds {
    type Err = McaError;

    /// `basis=S,K leaves=4 fuel=10000 pool_basis=S,K,Z0 pool=3 psi=3`; every key is required.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut kv = BTreeMap::new();
        for item in s.split(|c: char| c.is_whitespace() || c == ';').filter(|x| !x.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| McaError::Bounds(format!("expected key=value, found {item:?}")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let get = |k: &str| kv.get(k).ok_or_else(|| McaError::Bounds(format!("missing key {k}")));
        let num = |k: &str| -> Result<u64, McaError> {
            get(k)?.parse().map_err(|_| McaError::Bounds(format!("{k} is not a number")))
        };
        let basis = |k: &str| -> Result<Vec<Atom>, McaError> {
            get(k)?
                .split(',')
                .map(|a| Atom::from_name(a.trim()).ok_or_else(|| McaError::Bounds(format!("unknown atom {a:?}"))))
                .collect()
        };
        let known = ["basis", "leaves", "fuel", "pool_basis", "pool", "psi"];
        if let Some(k) = kv.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(McaError::Bounds(format!("unknown key {k}")));
        }
        let b = Bounds {
            basis: basis("basis")?,
            max_leaves: num("leaves")? as usize,
            fuel: num("fuel")?,
            pool_basis: basis("pool_basis")?,
            pool_leaves: num("pool")? as usize,
            psi_cap: num("psi")? as usize,
        };
        if b.max_leaves == 0 || b.basis.is_empty() {
            return Err(McaError::Bounds("the universe must be non-empty".into()));
        }
        Ok(b)
    }
}

/// Formal expressions over codes: `c`, variables and `l • r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expression {
    Code(Term),
    EVar(String),
    Bullet(Box<Expression>, Box<Expression>),
}

impl Expression {
    pub fn code(t: Term) -> Self {
        Expression::Code(t)
    }

    pub fn bullet(l: Expression, r: Expression) -> Self {
        Expression::Bullet(Box::new(l), Box::new(r))
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Expression::Code(_) => true,
            Expression::EVar(_) => false,
            Expression::Bullet(l, r) => l.is_closed() && r.is_closed(),
        }
    }

    /// The term whose machine run realizes the expression.
    fn as_term(&self) -> Result<Term, McaError> {
        match self {
            Expression::Code(t) => Ok(t.clone()),
            Expression::EVar(v) => Err(McaError::Open(v.clone())),
            Expression::Bullet(l, r) => Ok(Term::app(l.as_term()?, r.as_term()?)),
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Code(t) => match t {
                Term::App(..) => write!(f, "({t})"),
                _ => write!(f, "{t}"),
            },
            Expression::EVar(v) => f.write_str(v),
            Expression::Bullet(l, r) => write!(f, "({l} • {r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum M1Value {
    Empty,
    One(Term),
    /// The computation did not settle within this many steps.
    Unknown(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MonadicValue {
    M1(M1Value),
    /// A computation: the term is run against a continuation.
    Cps(Term),
}

impl MonadicValue {
    pub fn tier(&self) -> Tier {
        match self {
            MonadicValue::M1(_) => Tier::M1,
            MonadicValue::Cps(_) => Tier::Cps,
        }
    }
}

/// A proposition `A → 2`, shared and cheaply cloned; equality is structural.
#[derive(Clone)]
pub struct Prop {
    hash: u64,
    kind: Arc<PropKind>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PropKind {
    Always,
    Never,
    EqualsTerm(Term),
    /// Holds at `c` iff `c` and the term have the same normal form within the budget.
    ReducesTo(Term, u64),
    /// Explicit values at listed codes (sorted by code), `default` elsewhere.
    Table { entries: Vec<(Term, Elem)>, default: Elem },
    /// `(φ ∧ ψ)(c) = ◇⟨FST·c⟩φ ⊓ ◇⟨SND·c⟩ψ`.
    And(Prop, Prop),
    /// `(φ ⊃ Ψ)(c) = ⨅_{a} ⨅_{ψ∈Ψ} φ(a) ⊐ ◇⟨c·a⟩ψ`.
    Imp(Prop, Vec<Prop>),
    /// Tagged sum: `⨆_i ◇⟨FST·c⟩(= tag_i) ⊓ ◇⟨SND·c⟩φ_i`.
    BigCoprod(Vec<Prop>),
    Named(String, Prop),
}

impl Prop {
    fn new(kind: PropKind) -> Prop {
        let mut h = DefaultHasher::new();
        kind.hash(&mut h);
        Prop {
            hash: h.finish(),
            kind: Arc::new(kind),
        }
    }

    pub fn kind(&self) -> &PropKind {
        &self.kind
    }

    pub fn always() -> Prop {
        Prop::new(PropKind::Always)
    }

    pub fn never() -> Prop {
        Prop::new(PropKind::Never)
    }

    pub fn equals(t: Term) -> Prop {
        Prop::new(PropKind::EqualsTerm(t))
    }

    pub fn reduces_to(t: Term, budget: u64) -> Prop {
        Prop::new(PropKind::ReducesTo(t, budget))
    }

    pub fn table<I: IntoIterator<Item = (Term, Elem)>>(entries: I, default: Elem) -> Prop {
        let map: BTreeMap<Term, Elem> = entries.into_iter().collect();
        Prop::new(PropKind::Table {
            entries: map.into_iter().collect(),
            default,
        })
    }

    /// The proposition true exactly on `codes`.
    pub fn set<I: IntoIterator<Item = Term>>(codes: I) -> Prop {
        Prop::table(codes.into_iter().map(|t| (t, 1)), 0)
    }

    pub fn and(a: &Prop, b: &Prop) -> Prop {
        Prop::new(PropKind::And(a.clone(), b.clone()))
    }

    pub fn uimp(a: &Prop, psis: &[Prop]) -> Prop {
        Prop::new(PropKind::Imp(a.clone(), psis.to_vec()))
    }

    pub fn imp(a: &Prop, b: &Prop) -> Prop {
        Prop::uimp(a, std::slice::from_ref(b))
    }

    pub fn big_pi(psis: &[Prop]) -> Prop {
        Prop::uimp(&Prop::always(), psis)
    }

    pub fn not(a: &Prop) -> Prop {
        Prop::imp(a, &Prop::never())
    }

    pub fn dnn(a: &Prop) -> Prop {
        Prop::not(&Prop::not(a))
    }

    pub fn iff(a: &Prop, b: &Prop) -> Prop {
        Prop::and(&Prop::imp(a, b), &Prop::imp(b, a))
    }

    pub fn big_coprod(psis: &[Prop]) -> Prop {
        Prop::new(PropKind::BigCoprod(psis.to_vec()))
    }

    pub fn named(name: &str, p: &Prop) -> Prop {
        Prop::new(PropKind::Named(name.to_string(), p.clone()))
    }

    /// Codes outside the universe where the proposition is explicitly non-zero.
    pub fn support(&self) -> Vec<Term> {
        match &*self.kind {
            PropKind::EqualsTerm(t) => vec![t.clone()],
            PropKind::Table { entries, .. } => entries.iter().filter(|e| e.1 != 0).map(|e| e.0.clone()).collect(),
            PropKind::Named(_, p) => p.support(),
            _ => Vec::new(),
        }
    }
}

impl PartialEq for Prop {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.kind, &other.kind) || (self.hash == other.hash && self.kind == other.kind)
    }
}

impl Eq for Prop {}

impl Hash for Prop {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.hash);
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |ps: &[Prop]| ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ");
        match &*self.kind {
            PropKind::Always => f.write_str("⊤"),
            PropKind::Never => f.write_str("⊥"),
            PropKind::EqualsTerm(t) => write!(f, "=[{t}]"),
            PropKind::ReducesTo(t, b) => write!(f, "⇓{b}[{t}]"),
            PropKind::Table { entries, default } => {
                f.write_str("table{")?;
                for (t, v) in entries {
                    write!(f, "{t}↦{v}, ")?;
                }
                write!(f, "else {default}}}")
            }
            PropKind::And(a, b) => write!(f, "({a} ∧ {b})"),
            PropKind::Imp(a, ps) if ps.len() == 1 => write!(f, "({a} ⊃ {})", ps[0]),
            PropKind::Imp(a, ps) => write!(f, "({a} ⊃ {{{}}})", list(ps)),
            PropKind::BigCoprod(ps) => write!(f, "∐{{{}}}", list(ps)),
            PropKind::Named(n, _) => f.write_str(n),
        }
    }
}

impl fmt::Debug for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Prop({self})")
    }
}

/// The code marking summand `i` of a tagged sum.
pub fn coprod_tag(i: usize) -> Term {
    let tags = normal_universe(&[Atom::K, Atom::S], 4);
    tags[i % tags.len()].clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Imp,
    Iff,
    BigPi,
    Bottom,
    BigCoprod,
    Not,
    DoubleNeg,
}

/// Builds the connective's proposition; `Imp` takes the antecedent first and
/// the whole remaining list as `Ψ`.
pub fn connective_semantics(op: Connective, args: &[Prop]) -> Option<Prop> {
    Some(match (op, args) {
        (Connective::And, [a, b]) => Prop::and(a, b),
        (Connective::Imp, [a, rest @ ..]) => Prop::uimp(a, rest),
        (Connective::Iff, [a, b]) => Prop::iff(a, b),
        (Connective::BigPi, ps) => Prop::big_pi(ps),
        (Connective::Bottom, []) => Prop::never(),
        (Connective::BigCoprod, ps) => Prop::big_coprod(ps),
        (Connective::Not, [a]) => Prop::not(a),
        (Connective::DoubleNeg, [a]) => Prop::dnn(a),
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum HoleRun {
    Accept,
    Stuck,
    OutOfFuel,
    Returned(Term),
}

#[derive(Default)]
struct Caches {
    nf: Mutex<HashMap<Term, Option<Term>>>,
    hole: Mutex<HashMap<Term, HoleRun>>,
    prop: Mutex<HashMap<(Prop, Term), Truth>>,
    pole: Mutex<HashMap<(Term, Term), Truth>>,
    premise: Mutex<HashMap<(Prop, Term), Truth>>,
}

fn cached<K: Hash + Eq, V: Clone>(m: &Mutex<HashMap<K, V>>, k: &K) -> Option<V> {
    m.lock().unwrap().get(k).cloned()
}

fn store<K: Hash + Eq, V>(m: &Mutex<HashMap<K, V>>, k: K, v: V) {
    m.lock().unwrap().insert(k, v);
}

/// A monadic core `(A, 2, ◇, separator)` at declared bounds.
pub struct MonadicCore {
    tier: Tier,
    omega: HeytingAlgebra,
    bounds: Bounds,
    universe: Vec<Term>,
    args: Vec<Term>,
    pool: Vec<Term>,
    cache: Caches,
}

impl fmt::Debug for MonadicCore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MonadicCore({} |U|={} |A|={} |pool|={})",
            self.tier,
            self.universe.len(),
            self.args.len(),
            self.pool.len()
        )
    }
}

const TOP: Truth = Truth::Known(1);
const BOT: Truth = Truth::Known(0);

fn truth(b: bool) -> Truth {
    if b {
        TOP
    } else {
        BOT
    }
}

impl MonadicCore {
    /// The universe `U` is the set of normal terms over the basis; the
    /// argument set `A` adds the components `FST·c`, `SND·c` of every `c ∈ U`
    /// and, in the continuation tier, `throw_k` for every pool member `k`.
    pub fn new(tier: Tier, bounds: Bounds) -> MonadicCore {
        let universe = normal_universe(&bounds.basis, bounds.max_leaves);
        let pool = if tier == Tier::Cps {
            enumerate_terms(&bounds.pool_basis, bounds.pool_leaves)
        } else {
            Vec::new()
        };
        let mut args = universe.clone();
        let mut seen: HashSet<Term> = args.iter().cloned().collect();
        for c in &universe {
            for proj in [Atom::Fst, Atom::Snd] {
                let mut fuel = Fuel::new(bounds.fuel);
                if let Some(v) = normalize(&Term::app(Term::atom(proj), c.clone()), &mut fuel) {
                    if seen.insert(v.clone()) {
                        args.push(v);
                    }
                }
            }
        }
        for k in &pool {
            args.push(throw_to(k));
        }
        MonadicCore {
            tier,
            omega: HeytingAlgebra::builtin(Builtin::Bool2),
            bounds,
            universe,
            args,
            pool,
            cache: Caches::default(),
        }
    }

    pub fn tier(&self) -> Tier {
        self.tier
    }

    pub fn omega(&self) -> &HeytingAlgebra {
        &self.omega
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn universe(&self) -> &[Term] {
        &self.universe
    }

    /// The code set the implication meets range over.
    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn pool(&self) -> &[Term] {
        &self.pool
    }

    /// `M1`: closed `{S, K, P, FST, SND}` terms. `Cps`: the proof-like terms.
    pub fn in_separator(&self, t: &Term) -> bool {
        match self.tier {
            Tier::M1 => built_from(t, &[Atom::S, Atom::K, Atom::Pair, Atom::Fst, Atom::Snd]),
            Tier::Cps => is_proof_like(t),
        }
    }

    pub fn eta(&self, a: &Term) -> MonadicValue {
        match self.tier {
            Tier::M1 => MonadicValue::M1(M1Value::One(a.clone())),
            Tier::Cps => MonadicValue::Cps(a.clone()),
        }
    }

    /// Kleisli application `e·c`.
    pub fn apply(&self, e: &Term, c: &Term) -> MonadicValue {
        let t = Term::app(e.clone(), c.clone());
        match self.tier {
            Tier::M1 => MonadicValue::M1(match self.nf(&t) {
                Some(v) => M1Value::One(v),
                None => M1Value::Unknown(self.bounds.fuel),
            }),
            Tier::Cps => MonadicValue::Cps(t),
        }
    }

    /// `ν(c) = η(c)`; `ν(l • r)` sequences left then right and applies.
    pub fn evaluate(&self, e: &Expression) -> Result<MonadicValue, McaError> {
        match (self.tier, e) {
            (_, Expression::EVar(v)) => Err(McaError::Open(v.clone())),
            (_, Expression::Code(c)) => Ok(self.eta(c)),
            (Tier::Cps, Expression::Bullet(..)) => Ok(MonadicValue::Cps(e.as_term()?)),
            (Tier::M1, Expression::Bullet(l, r)) => {
                let lv = self.evaluate(l)?;
                let rv = self.evaluate(r)?;
                Ok(match (lv, rv) {
                    (MonadicValue::M1(M1Value::One(a)), MonadicValue::M1(M1Value::One(b))) => self.apply(&a, &b),
                    (MonadicValue::M1(M1Value::Empty), _) | (_, MonadicValue::M1(M1Value::Empty)) => {
                        MonadicValue::M1(M1Value::Empty)
                    }
                    _ => MonadicValue::M1(M1Value::Unknown(self.bounds.fuel)),
                })
            }
        }
    }

    pub fn modality_apply(&self, m: &MonadicValue, phi: &Prop) -> Result<Truth, McaError> {
        if m.tier() != self.tier {
            return Err(McaError::TierMismatch {
                expected: self.tier,
                found: m.tier(),
            });
        }
        Ok(match m {
            MonadicValue::M1(M1Value::Empty) => BOT,
            MonadicValue::M1(M1Value::One(v)) => self.prop_at(phi, v),
            MonadicValue::M1(M1Value::Unknown(_)) => Truth::Unknown,
            MonadicValue::Cps(t) => self.diamond(t, phi),
        })
    }

    fn nf(&self, t: &Term) -> Option<Term> {
        if let Some(v) = cached(&self.cache.nf, t) {
            return v;
        }
        let mut fuel = Fuel::new(self.bounds.fuel);
        let v = normalize(t, &mut fuel);
        store(&self.cache.nf, t.clone(), v.clone());
        v
    }

    fn hole_run(&self, m: &Term) -> HoleRun {
        if let Some(v) = cached(&self.cache.hole, m) {
            return v;
        }
        let r = run(Process::new(m.clone(), Ret::Hole), self.bounds.fuel, false);
        let v = match r.outcome {
            Outcome::Accept => HoleRun::Accept,
            Outcome::Stuck(_) => HoleRun::Stuck,
            Outcome::OutOfFuel => HoleRun::OutOfFuel,
            Outcome::HandedToHole(v) => HoleRun::Returned(v),
        };
        store(&self.cache.hole, m.clone(), v.clone());
        v
    }

    /// The value a computation returns, when it returns a closed one.
    pub fn returned_value(&self, m: &Term) -> Option<Term> {
        match self.tier {
            Tier::M1 => self.nf(m),
            Tier::Cps => match self.hole_run(m) {
                HoleRun::Returned(v) if !mentions_hole(&v) => Some(v),
                _ => None,
            },
        }
    }

    /// `k ⊥ a`.
    pub fn pole(&self, k: &Term, a: &Term) -> Truth {
        let key = (k.clone(), a.clone());
        if let Some(v) = cached(&self.cache.pole, &key) {
            return v;
        }
        let r = pole_run(k, a, self.bounds.fuel, false);
        let v = match r.outcome {
            Outcome::Accept => TOP,
            Outcome::OutOfFuel => Truth::Unknown,
            _ => BOT,
        };
        store(&self.cache.pole, key, v);
        v
    }

    /// `⨅_{a ∈ A ∪ supp φ} φ(a) ⊐ k ⊥ a`.
    pub fn premise(&self, phi: &Prop, k: &Term) -> Truth {
        let key = (phi.clone(), k.clone());
        if let Some(v) = cached(&self.cache.premise, &key) {
            return v;
        }
        let support = phi.support();
        let mut acc = TOP;
        for a in self.args.iter().chain(&support) {
            let pa = self.prop_at(phi, a);
            if pa == BOT {
                continue;
            }
            acc = self.omega.t_meet(acc, self.omega.t_imp(pa, self.pole(k, a)));
            if acc == BOT {
                break;
            }
        }
        store(&self.cache.premise, key, acc);
        acc
    }

    /// `◇⟨x ∈ m⟩φ` for the computation term `m` (its normal form in `M1`).
    pub fn diamond(&self, m: &Term, phi: &Prop) -> Truth {
        match self.tier {
            Tier::M1 => match self.nf(m) {
                Some(v) => self.prop_at(phi, &v),
                None => Truth::Unknown,
            },
            Tier::Cps => match self.hole_run(m) {
                HoleRun::Accept => TOP,
                HoleRun::Stuck => BOT,
                HoleRun::OutOfFuel => Truth::Unknown,
                HoleRun::Returned(v) if !mentions_hole(&v) => self.prop_at(phi, &v),
                HoleRun::Returned(v) => self.omega.t_big_meet(self.pool.iter().map(|k| {
                    let vk = fill_hole(&v, k);
                    let prem = self.omega.t_meet(
                        self.premise(phi, k),
                        self.omega.t_imp(self.prop_at(phi, &vk), self.pole(k, &vk)),
                    );
                    self.omega.t_imp(prem, self.pole(k, &vk))
                })),
            },
        }
    }

    /// `φ(c)`.
    pub fn prop_at(&self, phi: &Prop, c: &Term) -> Truth {
        match &*phi.kind {
            PropKind::Always => return TOP,
            PropKind::Never => return BOT,
            PropKind::EqualsTerm(t) => return truth(c == t),
            PropKind::Table { entries, default } => {
                return Truth::Known(match entries.binary_search_by(|e| e.0.cmp(c)) {
                    Ok(i) => entries[i].1,
                    Err(_) => *default,
                })
            }
            PropKind::Named(_, p) => return self.prop_at(p, c),
            _ => {}
        }
        let key = (phi.clone(), c.clone());
        if let Some(v) = cached(&self.cache.prop, &key) {
            return v;
        }
        let h = &self.omega;
        let fst = |c: &Term| Term::app(Term::atom(Atom::Fst), c.clone());
        let snd = |c: &Term| Term::app(Term::atom(Atom::Snd), c.clone());
        let v = match &*phi.kind {
            PropKind::ReducesTo(t, budget) => {
                let mut f1 = Fuel::new(*budget);
                let mut f2 = Fuel::new(*budget);
                match (normalize(c, &mut f1), normalize(t, &mut f2)) {
                    (Some(x), Some(y)) => truth(x == y),
                    _ => Truth::Unknown,
                }
            }
            PropKind::And(a, b) => {
                let l = self.diamond(&fst(c), a);
                if l == BOT {
                    BOT
                } else {
                    h.t_meet(l, self.diamond(&snd(c), b))
                }
            }
            PropKind::Imp(a, psis) => {
                let mut acc = TOP;
                'outer: for x in &self.args {
                    let pa = self.prop_at(a, x);
                    if pa == BOT {
                        continue;
                    }
                    let m = Term::app(c.clone(), x.clone());
                    for psi in psis {
                        acc = h.t_meet(acc, h.t_imp(pa, self.diamond(&m, psi)));
                        if acc == BOT {
                            break 'outer;
                        }
                    }
                }
                acc
            }
            PropKind::BigCoprod(psis) => {
                let mut acc = BOT;
                for (i, psi) in psis.iter().enumerate() {
                    let tag = self.diamond(&fst(c), &Prop::equals(coprod_tag(i)));
                    acc = h.t_join(acc, h.t_meet(tag, self.diamond(&snd(c), psi)));
                    if acc == TOP {
                        break;
                    }
                }
                acc
            }
            _ => unreachable!("handled above"),
        };
        store(&self.cache.prop, key, v);
        v
    }

    /// `φ(c) ≤ ◇⟨r ∈ e·c⟩ψ(r)` at one code: `Some(false)` only when exact.
    pub fn entails_at(&self, phi: &Prop, e: &Term, psi: &Prop, c: &Term) -> Option<bool> {
        let lhs = self.prop_at(phi, c);
        if lhs == BOT {
            return Some(true);
        }
        self.omega.t_leq(lhs, self.diamond(&Term::app(e.clone(), c.clone()), psi))
    }

    fn scan(&self, phi: &Prop, e: &Term, psi: &Prop, excuse: impl Fn(&Term) -> bool) -> Verdict {
        let mut unknown = None;
        for c in &self.universe {
            match self.entails_at(phi, e, psi, c) {
                Some(true) => {}
                Some(false) if excuse(c) => {}
                Some(false) => {
                    return Verdict::Fails(format!(
                        "c = {c}: {phi}(c) = {}, ◇⟨{e}·c⟩{psi} = {}",
                        show_truth(self.prop_at(phi, c)),
                        show_truth(self.diamond(&Term::app(e.clone(), c.clone()), psi))
                    ))
                }
                None => {
                    unknown.get_or_insert_with(|| format!("c = {c}: budget {} exhausted", self.bounds.fuel));
                }
            }
        }
        match unknown {
            Some(u) => Verdict::Unknown(u),
            None => Verdict::Holds,
        }
    }

    /// `φ ⊢e ψ` over the universe.
    pub fn check_evidence(&self, e: &Term, phi: &Prop, psi: &Prop) -> CheckResult {
        let mut w = Witness::new(format!("{phi} ⊢{e} {psi}"));
        if !self.in_separator(e) {
            w = w.with_line(format!("warning: {e} is outside the {} separator", self.tier));
        }
        match self.scan(phi, e, psi, |_| false) {
            Verdict::Holds => CheckResult::Verified(w.with_line(format!(
                "{} tier, |U| = {}, {}",
                self.tier,
                self.universe.len(),
                self.bounds
            ))),
            Verdict::Fails(at) => CheckResult::Counterexample(w.with_line(at)),
            Verdict::Unknown(at) => CheckResult::Inconclusive(w.with_line(at)),
        }
    }

    /// After-Return: `φ(a) ≤ ◇⟨x ∈ η(a)⟩φ(x)` for every sampled pair.
    pub fn check_after_return(&self, props: &[Prop], codes: &[Term]) -> CheckResult {
        for phi in props {
            for a in codes {
                let lhs = self.prop_at(phi, a);
                let rhs = self.modality_apply(&self.eta(a), phi).expect("same tier");
                if lhs != rhs && self.omega.t_leq(lhs, rhs) != Some(true) {
                    return CheckResult::Counterexample(Witness::new(format!(
                        "After-Return fails: {phi}({a}) = {}, ◇⟨η({a})⟩ = {}",
                        show_truth(lhs),
                        show_truth(rhs)
                    )));
                }
            }
        }
        CheckResult::verified(format!(
            "After-Return on {} propositions × {} codes ({} tier)",
            props.len(),
            codes.len(),
            self.tier
        ))
    }

    /// Evidence search space for `⊤ ⊢ φ` when `φ` is a `∏` of implications
    /// whose consequents are pairs of constants: `K r` and `K (K r)` for
    /// small `r`, with `r` ranging over `{S, K, P}`-terms of at most three
    /// leaves, their constant functions, and pairs of those.
    pub fn candidate_evidences(&self) -> Vec<Term> {
        let base = crate::reduce::enumerate_terms(&[Atom::S, Atom::K, Atom::Pair], 3);
        let consts: Vec<Term> = ["K", "K K", "P K K"]
            .iter()
            .map(|s| Term::app(K, parse_term(s).expect("fixed term")))
            .collect();
        let mut rs: Vec<Term> = base.to_vec();
        rs.extend(base.iter().map(|b| Term::app(K, b.clone())));
        for a in &consts {
            for b in &consts {
                rs.push(Term::apply_all(Term::atom(Atom::Pair), [a.clone(), b.clone()]));
            }
        }
        let mut out: Vec<Term> = rs.iter().map(|r| Term::app(K, r.clone())).collect();
        out.extend(rs.iter().map(|r| Term::app(K, Term::app(K, r.clone()))));
        out
    }

    /// Default sample for the conformance rows: five table propositions and
    /// seven evidences, including every construct. The widest proposition is
    /// true on `U` rather than on every code, so antecedents never range over
    /// the projections added to `A`, whose applications may exhaust the fuel.
    pub fn default_sample(&self) -> FrameSample<Prop, Term> {
        let p = |s: &str| parse_term(s).expect("fixed term");
        FrameSample {
            props: vec![
                Prop::named("inU", &Prop::set(self.universe.iter().cloned())),
                Prop::never(),
                Prop::equals(K),
                Prop::equals(S),
                Prop::named("isK|KK", &Prop::set([K, p("K K")])),
            ],
            evs: vec![
                self.e_id(),
                self.e_top(),
                p("K S"),
                p("S K"),
                self.e_fst(),
                self.e_snd(),
                self.e_eval(),
            ],
            psi_cap: self.bounds.psi_cap,
        }
    }
}

pub fn show_truth(t: Truth) -> String {
    match t {
        Truth::Known(e) => e.to_string(),
        Truth::Unknown => "?".into(),
    }
}

fn built_from(t: &Term, atoms: &[Atom]) -> bool {
    match t {
        Term::Atom(a) => atoms.contains(a),
        Term::App(f, x) => built_from(f, atoms) && built_from(x, atoms),
        Term::Cont(_) | Term::Var(_) => false,
    }
}

/// Built by application from `S, K, CC, P, FST, SND`; no captured
/// continuations and no result constant.
pub fn is_proof_like(t: &Term) -> bool {
    built_from(t, &[Atom::S, Atom::K, Atom::CC, Atom::Pair, Atom::Fst, Atom::Snd])
}

/// The frame induced by the core: propositions, separator terms as
/// evidences, and the bounded evidence relation.
impl EvidencedFrame for MonadicCore {
    type Prop = Prop;
    type Ev = Term;

    fn show_prop(&self, p: &Prop) -> String {
        p.to_string()
    }

    fn show_ev(&self, e: &Term) -> String {
        e.to_string()
    }

    fn entails(&self, phi: &Prop, e: &Term, psi: &Prop) -> Verdict {
        self.scan(phi, e, psi, |_| false)
    }

    /// A failure at `c` is a genuine violation only if every premise also
    /// holds at the codes the conclusion's computation passes through: the
    /// value of each premise evidence at `c`, and the pairs `P c a`. When some
    /// premise fails there, the row is vacuous on the enlarged universe.
    fn entails_given(&self, phi: &Prop, e: &Term, psi: &Prop, premises: &[Premise<Prop, Term>]) -> Verdict {
        self.scan(phi, e, psi, |c| {
            let mut derived = vec![c.clone()];
            for p in premises {
                if let Some(v) = self.returned_value(&Term::app(p.e.clone(), c.clone())) {
                    derived.push(v);
                }
            }
            for a in &self.args {
                derived.push(Term::apply_all(Term::atom(Atom::Pair), [c.clone(), a.clone()]));
            }
            premises
                .iter()
                .any(|p| derived.iter().any(|d| self.entails_at(&p.phi, &p.e, &p.psi, d) == Some(false)))
        })
    }

    fn top(&self) -> Prop {
        Prop::always()
    }

    fn and(&self, a: &Prop, b: &Prop) -> Prop {
        Prop::and(a, b)
    }

    fn uimp(&self, phi: &Prop, psis: &[Prop]) -> Prop {
        Prop::uimp(phi, psis)
    }

    fn bottom(&self) -> Prop {
        Prop::never()
    }

    fn big_coprod(&self, psis: &[Prop]) -> Prop {
        Prop::big_coprod(psis)
    }

    fn e_id(&self) -> Term {
        Term::identity()
    }

    /// `S (K e2) e1`.
    fn compose(&self, e1: &Term, e2: &Term) -> Term {
        Term::apply_all(S, [Term::app(K, e2.clone()), e1.clone()])
    }

    fn e_top(&self) -> Term {
        Term::app(K, K)
    }

    /// `λ*c. P (e1 c) (e2 c)`.
    fn pair(&self, e1: &Term, e2: &Term) -> Term {
        let c = Term::var("c");
        let body = Term::apply_all(
            Term::atom(Atom::Pair),
            [Term::app(e1.clone(), c.clone()), Term::app(e2.clone(), c)],
        );
        abstract_var("c", &body)
    }

    fn e_fst(&self) -> Term {
        Term::atom(Atom::Fst)
    }

    fn e_snd(&self) -> Term {
        Term::atom(Atom::Snd)
    }

    /// `λ*x.λ*y. e (P x y)`.
    fn lam(&self, e: &Term) -> Term {
        let body = Term::app(
            e.clone(),
            Term::apply_all(Term::atom(Atom::Pair), [Term::var("x"), Term::var("y")]),
        );
        abstract_vars(&["x", "y"], &body)
    }

    /// `S FST SND`.
    fn e_eval(&self) -> Term {
        Term::apply_all(S, [Term::atom(Atom::Fst), Term::atom(Atom::Snd)])
    }
}

#[derive(Deserialize)]
struct PropFile {
    #[serde(default)]
    prop: Vec<PropEntry>,
}

#[derive(Deserialize)]
struct PropEntry {
    name: String,
    kind: String,
    term: Option<String>,
    budget: Option<u64>,
    default: Option<String>,
    #[serde(default)]
    entries: BTreeMap<String, String>,
}

fn parse_elem(s: &str) -> Result<Elem, McaError> {
    match s.trim() {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(McaError::Format(format!("truth value {other:?} is not 0 or 1"))),
    }
}

/// Parses named propositions (TOML `[[prop]]` blocks with `kind` one of
/// `always`, `never`, `equals`, `reduces`, `table`).
pub fn parse_prop_file(text: &str) -> Result<Vec<Prop>, McaError> {
    let f: PropFile = toml::from_str(text).map_err(|e| McaError::Format(e.to_string()))?;
    let term = |e: &PropEntry| -> Result<Term, McaError> {
        let src = e
            .term
            .as_deref()
            .ok_or_else(|| McaError::Format(format!("{}: missing term", e.name)))?;
        parse_term(src).map_err(|err| McaError::Format(format!("{}: {err}", e.name)))
    };
    f.prop
        .iter()
        .map(|e| {
            let p = match e.kind.as_str() {
                "always" => Prop::always(),
                "never" => Prop::never(),
                "equals" => Prop::equals(term(e)?),
                "reduces" => Prop::reduces_to(term(e)?, e.budget.unwrap_or(1000)),
                "table" => {
                    let mut entries = Vec::new();
                    for (k, v) in &e.entries {
                        let t = parse_term(k).map_err(|err| McaError::Format(format!("{}: {err}", e.name)))?;
                        entries.push((t, parse_elem(v)?));
                    }
                    Prop::table(entries, parse_elem(e.default.as_deref().unwrap_or("0"))?)
                }
                other => return Err(McaError::Format(format!("{}: unknown kind {other:?}", e.name))),
            };
            Ok(Prop::named(&e.name, &p))
        })
        .collect()
}
