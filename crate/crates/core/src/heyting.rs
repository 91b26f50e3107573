//! Finite Heyting algebras with explicit operation tables.
//!
//! Elements are indices into the carrier. Tables are stored, never computed
//! lazily, so every law check is a plain loop over the carrier.

use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::check::{CheckResult, Witness};

pub type Elem = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("unknown builtin algebra {0:?}")]
    UnknownBuiltin(String),
    #[error("element {0:?} is not in the carrier")]
    UnknownElement(String),
    #[error("element index {0} is outside the carrier")]
    OutOfCarrier(Elem),
    #[error("table {table} is not total: expected {expected} entries, found {found}")]
    NonTotal {
        table: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("order has no {what} for {a:?} and {b:?}")]
    MissingBound {
        what: &'static str,
        a: String,
        b: String,
    },
    #[error("the order has no {0} element")]
    MissingExtremum(&'static str),
    #[error("empty carrier")]
    Empty,
    #[error("algebra file: {0}")]
    Format(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct HeytingAlgebra {
    name: String,
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<Elem>>,
    join: Vec<Vec<Elem>>,
    imp: Vec<Vec<Elem>>,
    top: Elem,
    bottom: Elem,
}

impl fmt::Debug for HeytingAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HeytingAlgebra({} {:?})", self.name, self.names)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Bool2,
    Chain3,
    Diamond4,
}

impl Builtin {
    pub const ALL: [Builtin; 3] = [Builtin::Bool2, Builtin::Chain3, Builtin::Diamond4];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Bool2 => "BOOL2",
            Builtin::Chain3 => "CHAIN3",
            Builtin::Diamond4 => "DIAMOND4",
        }
    }
}

pub fn builtin_algebra(name: &str) -> Result<HeytingAlgebra, AlgebraError> {
    let b = Builtin::ALL
        .into_iter()
        .find(|b| b.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| AlgebraError::UnknownBuiltin(name.to_string()))?;
    Ok(HeytingAlgebra::builtin(b))
}

impl HeytingAlgebra {
    pub fn builtin(b: Builtin) -> HeytingAlgebra {
        let (names, order): (&[&str], &[(&str, &str)]) = match b {
            Builtin::Bool2 => (&["0", "1"], &[("0", "1")]),
            Builtin::Chain3 => (&["0", "h", "1"], &[("0", "h"), ("h", "1")]),
            Builtin::Diamond4 => (
                &["0", "a", "b", "1"],
                &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
            ),
        };
        let mut h = HeytingAlgebra::from_order(names, order).expect("builtin algebras are lattices");
        h.name = b.name().to_string();
        h
    }

    /// Builds the algebra from generating order pairs `(lower, upper)`; the
    /// reflexive-transitive closure is taken and every table is derived.
    pub fn from_order<S: AsRef<str>>(names: &[S], pairs: &[(S, S)]) -> Result<HeytingAlgebra, AlgebraError> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let n = names.len();
        if n == 0 {
            return Err(AlgebraError::Empty);
        }
        let idx = |s: &str| {
            names
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| AlgebraError::UnknownElement(s.to_string()))
        };
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in pairs {
            leq[idx(a.as_ref())?][idx(b.as_ref())?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        let top = (0..n)
            .find(|&t| (0..n).all(|x| leq[x][t]))
            .ok_or(AlgebraError::MissingExtremum("top"))?;
        let bottom = (0..n)
            .find(|&t| (0..n).all(|x| leq[t][x]))
            .ok_or(AlgebraError::MissingExtremum("bottom"))?;
        let greatest = |cands: Vec<Elem>| cands.iter().copied().find(|&c| cands.iter().all(|&d| leq[d][c]));
        let least = |cands: Vec<Elem>| cands.iter().copied().find(|&c| cands.iter().all(|&d| leq[c][d]));
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        let mut imp = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<Elem> = (0..n).filter(|&x| leq[x][a] && leq[x][b]).collect();
                meet[a][b] = greatest(lower).ok_or_else(|| AlgebraError::MissingBound {
                    what: "meet",
                    a: names[a].clone(),
                    b: names[b].clone(),
                })?;
                let upper: Vec<Elem> = (0..n).filter(|&x| leq[a][x] && leq[b][x]).collect();
                join[a][b] = least(upper).ok_or_else(|| AlgebraError::MissingBound {
                    what: "join",
                    a: names[a].clone(),
                    b: names[b].clone(),
                })?;
            }
        }
        for a in 0..n {
            for b in 0..n {
                let sols: Vec<Elem> = (0..n).filter(|&x| leq[meet[x][a]][b]).collect();
                imp[a][b] = greatest(sols).ok_or_else(|| AlgebraError::MissingBound {
                    what: "implication",
                    a: names[a].clone(),
                    b: names[b].clone(),
                })?;
            }
        }
        Ok(HeytingAlgebra {
            name: "custom".into(),
            names,
            leq,
            meet,
            join,
            imp,
            top,
            bottom,
        })
    }

    /// Assembles an algebra from explicit tables without checking any law;
    /// run [`validate_algebra`] on the result.
    #[allow(clippy::too_many_arguments)]
    pub fn from_tables(
        names: Vec<String>,
        leq: Vec<Vec<bool>>,
        meet: Vec<Vec<Elem>>,
        join: Vec<Vec<Elem>>,
        imp: Vec<Vec<Elem>>,
        top: Elem,
        bottom: Elem,
    ) -> Result<HeytingAlgebra, AlgebraError> {
        let n = names.len();
        if n == 0 {
            return Err(AlgebraError::Empty);
        }
        fn total<T>(table: &'static str, t: &[Vec<T>], n: usize) -> Result<(), AlgebraError> {
            let found: usize = t.iter().map(Vec::len).sum();
            if t.len() != n || t.iter().any(|r| r.len() != n) {
                return Err(AlgebraError::NonTotal {
                    table,
                    expected: n * n,
                    found,
                });
            }
            Ok(())
        }
        total("order", &leq, n)?;
        total("meet", &meet, n)?;
        total("join", &join, n)?;
        total("imp", &imp, n)?;
        for &e in meet.iter().chain(&join).chain(&imp).flatten().chain([&top, &bottom]) {
            if e >= n {
                return Err(AlgebraError::OutOfCarrier(e));
            }
        }
        Ok(HeytingAlgebra {
            name: "custom".into(),
            names,
            leq,
            meet,
            join,
            imp,
            top,
            bottom,
        })
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Overwrites one implication entry (used to build deliberately broken algebras).
    pub fn with_imp_entry(mut self, a: Elem, b: Elem, value: Elem) -> Self {
        self.imp[a][b] = value;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.names.len()
    }

    pub fn elem_name(&self, e: Elem) -> &str {
        &self.names[e]
    }

    pub fn elem(&self, name: &str) -> Result<Elem, AlgebraError> {
        self.names
            .iter()
            .position(|x| x == name)
            .ok_or_else(|| AlgebraError::UnknownElement(name.to_string()))
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a][b]
    }

    #[inline]
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a][b]
    }

    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a][b]
    }

    #[inline]
    pub fn imp(&self, a: Elem, b: Elem) -> Elem {
        self.imp[a][b]
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.imp(a, self.bottom)
    }

    /// Double negation `(a ⊐ 0) ⊐ 0`.
    pub fn ddn(&self, a: Elem) -> Elem {
        self.neg(self.neg(a))
    }

    pub fn big_meet<I: IntoIterator<Item = Elem>>(&self, xs: I) -> Result<Elem, AlgebraError> {
        xs.into_iter().try_fold(self.top, |acc, x| {
            if x >= self.len() {
                Err(AlgebraError::OutOfCarrier(x))
            } else {
                Ok(self.meet(acc, x))
            }
        })
    }

    pub fn big_join<I: IntoIterator<Item = Elem>>(&self, xs: I) -> Result<Elem, AlgebraError> {
        xs.into_iter().try_fold(self.bottom, |acc, x| {
            if x >= self.len() {
                Err(AlgebraError::OutOfCarrier(x))
            } else {
                Ok(self.join(acc, x))
            }
        })
    }

    /// Loads an algebra file (TOML): `carrier`, generating `order` pairs and
    /// optional `meet`/`join`/`imp` entries `[a, b, result]` overriding the
    /// derived tables. A bare builtin name (`BOOL2`, ...) is also accepted.
    pub fn from_file_text(text: &str) -> Result<HeytingAlgebra, AlgebraError> {
        let trimmed = text.trim();
        if let Ok(b) = builtin_algebra(trimmed) {
            return Ok(b);
        }
        #[derive(Deserialize)]
        struct File {
            name: Option<String>,
            carrier: Vec<String>,
            #[serde(default)]
            order: Vec<(String, String)>,
            #[serde(default)]
            meet: Vec<(String, String, String)>,
            #[serde(default)]
            join: Vec<(String, String, String)>,
            #[serde(default)]
            imp: Vec<(String, String, String)>,
        }
        let f: File = toml::from_str(text).map_err(|e| AlgebraError::Format(e.to_string()))?;
        let pairs: Vec<(&str, &str)> = f.order.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let names: Vec<&str> = f.carrier.iter().map(String::as_str).collect();
        let mut h = HeytingAlgebra::from_order(&names, &pairs)?;
        for (table, entries) in [("meet", &f.meet), ("join", &f.join), ("imp", &f.imp)] {
            for (a, b, r) in entries {
                let (a, b, r) = (h.elem(a)?, h.elem(b)?, h.elem(r)?);
                match table {
                    "meet" => h.meet[a][b] = r,
                    "join" => h.join[a][b] = r,
                    _ => h.imp[a][b] = r,
                }
            }
        }
        if let Some(n) = f.name {
            h.name = n;
        }
        Ok(h)
    }
}

/// Checks order axioms, lattice bounds, extrema and residuation exhaustively.
pub fn validate_algebra(h: &HeytingAlgebra) -> CheckResult {
    let n = h.len();
    let nm = |e: Elem| h.elem_name(e).to_string();
    let fail = |law: &str, items: &[Elem]| {
        let names: Vec<String> = items.iter().map(|&e| nm(e)).collect();
        CheckResult::Counterexample(Witness::new(format!("{law} at ({})", names.join(","))))
    };
    for a in 0..n {
        if !h.leq(a, a) {
            return fail("reflexivity", &[a]);
        }
        if !h.leq(h.bottom, a) {
            return fail("bottom", &[a]);
        }
        if !h.leq(a, h.top) {
            return fail("top", &[a]);
        }
        for b in 0..n {
            if a != b && h.leq(a, b) && h.leq(b, a) {
                return fail("antisymmetry", &[a, b]);
            }
            for c in 0..n {
                if h.leq(a, b) && h.leq(b, c) && !h.leq(a, c) {
                    return fail("transitivity", &[a, b, c]);
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            let m = h.meet(a, b);
            if !(h.leq(m, a) && h.leq(m, b)) || (0..n).any(|x| h.leq(x, a) && h.leq(x, b) && !h.leq(x, m)) {
                return fail("meet", &[a, b]);
            }
            let j = h.join(a, b);
            if !(h.leq(a, j) && h.leq(b, j)) || (0..n).any(|x| h.leq(a, x) && h.leq(b, x) && !h.leq(j, x)) {
                return fail("join", &[a, b]);
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if h.leq(h.meet(a, b), c) != h.leq(a, h.imp(b, c)) {
                    return fail("residuation", &[a, b, c]);
                }
            }
        }
    }
    CheckResult::Verified(Witness::new(format!(
        "{}: {} residuation triples",
        h.name(),
        n * n * n
    )))
}

/// Three-valued truth value: an Ω element, or unknown because some
/// computation ran out of budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth {
    Known(Elem),
    Unknown,
}

impl Truth {
    pub fn known(self) -> Option<Elem> {
        match self {
            Truth::Known(e) => Some(e),
            Truth::Unknown => None,
        }
    }
}

/// Kleene-style lifts of the Heyting operations: a result is known whenever
/// it is determined regardless of the unknown operand.
impl HeytingAlgebra {
    pub fn t_meet(&self, a: Truth, b: Truth) -> Truth {
        match (a, b) {
            (Truth::Known(x), Truth::Known(y)) => Truth::Known(self.meet(x, y)),
            (Truth::Known(x), Truth::Unknown) | (Truth::Unknown, Truth::Known(x)) if x == self.bottom => {
                Truth::Known(self.bottom)
            }
            _ => Truth::Unknown,
        }
    }

    pub fn t_join(&self, a: Truth, b: Truth) -> Truth {
        match (a, b) {
            (Truth::Known(x), Truth::Known(y)) => Truth::Known(self.join(x, y)),
            (Truth::Known(x), Truth::Unknown) | (Truth::Unknown, Truth::Known(x)) if x == self.top => {
                Truth::Known(self.top)
            }
            _ => Truth::Unknown,
        }
    }

    pub fn t_imp(&self, a: Truth, b: Truth) -> Truth {
        match (a, b) {
            (Truth::Known(x), Truth::Known(y)) => Truth::Known(self.imp(x, y)),
            (Truth::Known(x), Truth::Unknown) if x == self.bottom => Truth::Known(self.top),
            (Truth::Unknown, Truth::Known(y)) if y == self.top => Truth::Known(self.top),
            _ => Truth::Unknown,
        }
    }

    /// `a ≤ b` lifted: `Some(true/false)` when determined.
    pub fn t_leq(&self, a: Truth, b: Truth) -> Option<bool> {
        match (a, b) {
            (Truth::Known(x), Truth::Known(y)) => Some(self.leq(x, y)),
            (Truth::Known(x), Truth::Unknown) if x == self.bottom => Some(true),
            (Truth::Unknown, Truth::Known(y)) if y == self.top => Some(true),
            _ => None,
        }
    }

    pub fn t_big_meet<I: IntoIterator<Item = Truth>>(&self, xs: I) -> Truth {
        let mut acc = Truth::Known(self.top);
        for x in xs {
            acc = self.t_meet(acc, x);
            if acc == Truth::Known(self.bottom) {
                break;
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> HeytingAlgebra {
        HeytingAlgebra::builtin(Builtin::Chain3)
    }

    /// Independent oracle: largest x with x ∧ a ≤ b, by search.
    fn imp_oracle(h: &HeytingAlgebra, a: Elem, b: Elem) -> Elem {
        let sols: Vec<Elem> = h.elements().filter(|&x| h.leq(h.meet(x, a), b)).collect();
        *sols.iter().find(|&&c| sols.iter().all(|&d| h.leq(d, c))).unwrap()
    }

    #[test]
    fn builtin_tables() {
        let b = HeytingAlgebra::builtin(Builtin::Bool2);
        assert_eq!(b.imp(1, 0), 0);
        let c = chain3();
        let (z, h) = (c.elem("0").unwrap(), c.elem("h").unwrap());
        assert_eq!(c.imp(h, z), z);
        assert_eq!(c.imp(z, z), c.top());
        assert_eq!(c.ddn(h), c.top());
        let d = HeytingAlgebra::builtin(Builtin::Diamond4);
        let (a, bb) = (d.elem("a").unwrap(), d.elem("b").unwrap());
        assert_eq!(d.imp(a, bb), bb);
        assert_eq!(imp_oracle(&d, a, bb), bb);
        assert_eq!(d.big_join([a, bb]).unwrap(), d.top());
    }

    #[test]
    fn implication_matches_search_oracle() {
        for b in Builtin::ALL {
            let h = HeytingAlgebra::builtin(b);
            for x in h.elements() {
                for y in h.elements() {
                    assert_eq!(h.imp(x, y), imp_oracle(&h, x, y));
                }
            }
        }
    }

    #[test]
    fn validation() {
        for b in Builtin::ALL {
            assert!(validate_algebra(&HeytingAlgebra::builtin(b)).is_verified());
        }
        let c = chain3();
        let (z, h) = (c.elem("0").unwrap(), c.elem("h").unwrap());
        let broken = c.with_imp_entry(h, z, h);
        match validate_algebra(&broken) {
            CheckResult::Counterexample(w) => assert_eq!(w.label, "residuation at (h,h,0)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn big_operations() {
        let c = chain3();
        let h = c.elem("h").unwrap();
        assert_eq!(c.big_meet([h, c.top()]).unwrap(), h);
        assert_eq!(c.big_meet([]).unwrap(), c.top());
        assert_eq!(c.big_join([]).unwrap(), c.bottom());
        assert_eq!(c.big_meet([7]), Err(AlgebraError::OutOfCarrier(7)));
    }

    #[test]
    fn non_total_tables_rejected() {
        let err = HeytingAlgebra::from_tables(
            vec!["0".into(), "1".into()],
            vec![vec![true, true], vec![false, true]],
            vec![vec![0, 0], vec![0]],
            vec![vec![0, 1], vec![1, 1]],
            vec![vec![1, 1], vec![0, 1]],
            1,
            0,
        );
        assert!(matches!(err, Err(AlgebraError::NonTotal { table: "meet", .. })));
        assert!(builtin_algebra("PENTAGON").is_err());
    }

    #[test]
    fn file_format() {
        let text = r#"
            name = "chain"
            carrier = ["0", "h", "1"]
            order = [["0", "h"], ["h", "1"]]
        "#;
        let h = HeytingAlgebra::from_file_text(text).unwrap();
        assert_eq!(h, chain3().with_name("chain"));
        assert_eq!(HeytingAlgebra::from_file_text("DIAMOND4").unwrap().len(), 4);
        let broken = r#"
            carrier = ["0", "h", "1"]
            order = [["0", "h"], ["h", "1"]]
            imp = [["h", "0", "h"]]
        "#;
        assert!(!validate_algebra(&HeytingAlgebra::from_file_text(broken).unwrap()).is_verified());
    }

    #[test]
    fn double_negation_shadow_identities() {
        for b in Builtin::ALL {
            let h = HeytingAlgebra::builtin(b);
            for x in h.elements() {
                assert!(h.leq(x, h.ddn(x)));
                assert!(h.leq(h.ddn(h.ddn(x)), h.ddn(x)));
                for y in h.elements() {
                    assert_eq!(h.ddn(h.meet(x, y)), h.meet(h.ddn(x), h.ddn(y)));
                }
            }
        }
    }
}
