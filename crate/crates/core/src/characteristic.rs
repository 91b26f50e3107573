//! The characteristic transform from expression-set predicates (the
//! classical realizability tripos over the partiality tier) to predicates of
//! the induced evidenced frame, with bounded checks of order preservation,
//! naturality and the round trip through tables.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::check::{CheckResult, Witness};
use crate::mca::{Expression, M1Value, McaError, MonadicCore, MonadicValue, Prop, Tier};
use crate::term::{parse_term, Term};

/// `φ : X → P(E)`, one finite expression set per point.
pub type EtPred = Vec<Vec<Expression>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChError {
    Mca(McaError),
    /// An evaluation ran out of fuel.
    Inconclusive(String),
}

impl From<McaError> for ChError {
    fn from(e: McaError) -> Self {
        ChError::Mca(e)
    }
}

impl std::fmt::Display for ChError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ChError::Mca(e) => write!(f, "{e}"),
            ChError::Inconclusive(s) => write!(f, "inconclusive: {s}"),
        }
    }
}

fn require_m1(core: &MonadicCore) -> Result<(), ChError> {
    if core.tier() != Tier::M1 {
        return Err(McaError::TierMismatch {
            expected: Tier::M1,
            found: core.tier(),
        }
        .into());
    }
    Ok(())
}

/// `ν(K) = ⋃_{e ∈ K} ν(e)`.
pub fn nu_set(core: &MonadicCore, k: &[Expression]) -> Result<BTreeSet<Term>, ChError> {
    require_m1(core)?;
    let mut out = BTreeSet::new();
    for e in k {
        match core.evaluate(e)? {
            MonadicValue::M1(M1Value::One(v)) => {
                out.insert(v);
            }
            MonadicValue::M1(M1Value::Empty) => {}
            _ => return Err(ChError::Inconclusive(format!("ν({e}) exhausts the fuel"))),
        }
    }
    Ok(out)
}

/// The frame predicate true exactly on `ν(K)`.
pub fn characteristic(core: &MonadicCore, k: &[Expression]) -> Result<Prop, ChError> {
    let codes = nu_set(core, k)?;
    Ok(if codes.is_empty() { Prop::never() } else { Prop::set(codes) })
}

/// `Ch_X(φ)`.
pub fn characteristic_transform(core: &MonadicCore, phi: &EtPred) -> Result<Vec<Prop>, ChError> {
    phi.iter().map(|k| characteristic(core, k)).collect()
}

/// Inverse on tables: the codes where a predicate holds, among `codes`.
pub fn from_table(core: &MonadicCore, chi: &[Prop], codes: &[Term]) -> EtPred {
    chi.iter()
        .map(|p| {
            codes
                .iter()
                .filter(|c| core.prop_at(p, c) == crate::heyting::Truth::Known(1))
                .map(|c| Expression::code(c.clone()))
                .collect()
        })
        .collect()
}

/// `φ ≤ ψ` in the tripos order, witnessed by `a`: every `b ∈ φ(x)` has
/// `ν(a • b)` non-empty and inside `ν(ψ(x))`.
pub fn et_leq(core: &MonadicCore, phi: &EtPred, psi: &EtPred, a: &Term) -> Result<bool, ChError> {
    for (k, l) in phi.iter().zip(psi) {
        let target = nu_set(core, l)?;
        for b in k {
            let ab = Expression::bullet(Expression::code(a.clone()), b.clone());
            let got = nu_set(core, std::slice::from_ref(&ab))?;
            if got.is_empty() || !got.is_subset(&target) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `Ch(φ) ≤_X Ch(ψ)` with evidence `a`, checked at every code of `U` and of
/// the supports of `Ch(φ)`.
pub fn ch_leq(core: &MonadicCore, phi: &[Prop], psi: &[Prop], a: &Term) -> Option<bool> {
    for (p, q) in phi.iter().zip(psi) {
        let mut codes: Vec<Term> = core.universe().to_vec();
        codes.extend(p.support());
        for c in &codes {
            match core.entails_at(p, a, q, c) {
                Some(true) => {}
                other => return other,
            }
        }
    }
    Some(true)
}

/// Pointwise equality of two frame predicates on `codes`.
fn same_on(core: &MonadicCore, p: &Prop, q: &Prop, codes: &[Term]) -> bool {
    codes.iter().all(|c| core.prop_at(p, c) == core.prop_at(q, c))
}

/// Evidence candidates for the order checks.
pub fn bridge_evidences() -> Vec<Term> {
    ["S K K", "K", "K K", "S K", "K S", "S (K K) (S K K)", "S (S K K) (S K K)"]
        .iter()
        .map(|s| parse_term(s).expect("fixed term"))
        .collect()
}

/// Expressions the sampled predicates draw from: codes of `U` and small
/// applications among them.
fn expression_pool(core: &MonadicCore) -> Vec<Expression> {
    let u = core.universe();
    let small: Vec<&Term> = u.iter().filter(|t| t.size() <= 2).collect();
    let mut pool: Vec<Expression> = u.iter().map(|t| Expression::code(t.clone())).collect();
    for l in &small {
        for r in &small {
            pool.push(Expression::bullet(Expression::code((*l).clone()), Expression::code((*r).clone())));
        }
    }
    pool
}

/// Samples `n` instances `(φ : Y → P(E), f : X → Y, a)` and checks, for each:
/// order preservation (`φ ≤ ψ` by `a` implies `Ch φ ≤ Ch ψ` by `a`, where
/// `ψ` contains the `a`-images of `φ`), naturality
/// `Ch_X(φ ∘ f) = Ch_Y(φ) ∘ f`, and the round trip through tables on `U`.
pub fn check_bridge(core: &MonadicCore, n: usize, seed: u64) -> CheckResult {
    if let Err(e) = require_m1(core) {
        return CheckResult::counterexample(e.to_string());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = expression_pool(core);
    let evs = bridge_evidences();
    let u = core.universe().to_vec();
    let mut ordered = 0usize;
    let mut skipped = 0usize;
    for i in 0..n {
        let ny = rng.random_range(1..=3);
        let nx = rng.random_range(1..=3);
        let phi: EtPred = (0..ny)
            .map(|_| {
                let size = rng.random_range(0..=3);
                pool.choose_multiple(&mut rng, size).cloned().collect()
            })
            .collect();
        let f: Vec<usize> = (0..nx).map(|_| rng.random_range(0..ny)).collect();
        let a = evs.choose(&mut rng).expect("non-empty").clone();
        let label = |what: &str| format!("instance {i}: {what}, a = {a}, f = {f:?}");

        // ψ(y) = the a-images of φ(y) plus one random extra expression.
        let psi: EtPred = phi
            .iter()
            .map(|k| {
                let mut l: Vec<Expression> = k
                    .iter()
                    .map(|b| Expression::bullet(Expression::code(a.clone()), b.clone()))
                    .collect();
                l.extend(pool.choose(&mut rng).cloned());
                l
            })
            .collect();
        let (ch_phi, ch_psi) = match (characteristic_transform(core, &phi), characteristic_transform(core, &psi)) {
            (Ok(p), Ok(q)) => (p, q),
            _ => {
                skipped += 1;
                continue;
            }
        };
        match et_leq(core, &phi, &psi, &a) {
            Ok(true) => {
                ordered += 1;
                if ch_leq(core, &ch_phi, &ch_psi, &a) != Some(true) {
                    return CheckResult::counterexample(label("Ch does not preserve the order"));
                }
            }
            Ok(false) => {}
            Err(_) => {
                skipped += 1;
                continue;
            }
        }

        let pulled: EtPred = f.iter().map(|&y| phi[y].clone()).collect();
        let lhs = match characteristic_transform(core, &pulled) {
            Ok(p) => p,
            Err(e) => return CheckResult::inconclusive(label(&e.to_string())),
        };
        for (x, &y) in f.iter().enumerate() {
            if !same_on(core, &lhs[x], &ch_phi[y], &u) || lhs[x].support() != ch_phi[y].support() {
                return CheckResult::counterexample(label(&format!("naturality fails at x = {x}")));
            }
        }

        let back = from_table(core, &ch_phi, &u);
        let again = match characteristic_transform(core, &back) {
            Ok(p) => p,
            Err(e) => return CheckResult::inconclusive(label(&e.to_string())),
        };
        for (y, (p, q)) in ch_phi.iter().zip(&again).enumerate() {
            if !same_on(core, p, q, &u) {
                return CheckResult::counterexample(label(&format!("round trip differs at y = {y}")));
            }
        }
        let tables: Vec<Prop> = (0..ny)
            .map(|_| Prop::set(u.iter().filter(|_| rng.random_bool(0.3)).cloned()))
            .collect();
        let round = match characteristic_transform(core, &from_table(core, &tables, &u)) {
            Ok(p) => p,
            Err(e) => return CheckResult::inconclusive(label(&e.to_string())),
        };
        if tables.iter().zip(&round).any(|(t, r)| !same_on(core, t, r, &u)) {
            return CheckResult::counterexample(label("table round trip is not the identity on U"));
        }
    }
    if skipped * 2 > n {
        return CheckResult::inconclusive(format!("{skipped} of {n} instances exhausted the fuel"));
    }
    CheckResult::Verified(
        Witness::new(format!("Ch bridge on {} sampled instances (seed {seed})", n - skipped))
            .with_line(format!("order preservation exercised on {ordered} ordered pairs"))
            .with_line("naturality and table round trip on every instance")
            .with_line(format!("{} tier, |U| = {}, {}", core.tier(), u.len(), core.bounds())),
    )
}
