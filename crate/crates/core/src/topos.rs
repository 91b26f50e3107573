//! The topos of a finite evidenced frame: objects with equality predicates,
//! functional predicates up to equivalence, composition, products,
//! equalizers and the subobject classifier, with exhaustive law checks.
//!
//! Every `∏`, `∐`, `∧`, `⊃` is the frame's own connective; a formula "holds"
//! when `⊤` has evidence for it.

use std::collections::HashMap;
use std::fmt;

use serde::Deserialize;
use thiserror::Error;

use crate::check::{CheckResult, Witness};
use crate::frame::{mask_of, FiniteFrame};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToposError {
    #[error("object file: {0}")]
    Format(String),
    #[error("{0}")]
    Invalid(String),
}

/// `(X, ∼)` with `X = {0..n}`; `eq` is row-major `n × n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EftObject {
    pub names: Vec<String>,
    pub eq: Vec<usize>,
}

impl EftObject {
    pub fn new(eq: Vec<Vec<usize>>) -> Self {
        let n = eq.len();
        EftObject {
            names: (0..n).map(|i| format!("x{i}")).collect(),
            eq: eq.into_iter().flatten().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn sim(&self, x: usize, y: usize) -> usize {
        self.eq[x * self.len() + y]
    }

    pub fn ex(&self, x: usize) -> usize {
        self.sim(x, x)
    }
}

/// A functional predicate `F : X × Y → Φ`, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    pub src: EftObject,
    pub dst: EftObject,
    pub rel: Vec<usize>,
}

impl Morphism {
    pub fn at(&self, x: usize, y: usize) -> usize {
        self.rel[x * self.dst.len() + y]
    }
}

/// Product object with its projections.
#[derive(Debug, Clone)]
pub struct Product {
    pub obj: EftObject,
    pub p1: Morphism,
    pub p2: Morphism,
    /// Carrier index of `(x, y)` is `x * |Y| + y`.
    pub right_len: usize,
}

pub struct Eft<'a> {
    f: &'a FiniteFrame,
}

impl<'a> Eft<'a> {
    pub fn new(f: &'a FiniteFrame) -> Self {
        Eft { f }
    }

    pub fn frame(&self) -> &FiniteFrame {
        self.f
    }

    fn pi<I: IntoIterator<Item = usize>>(&self, ps: I) -> usize {
        let v: Vec<usize> = ps.into_iter().collect();
        self.f.big_pi_mask(mask_of(&v))
    }

    fn coprod<I: IntoIterator<Item = usize>>(&self, ps: I) -> usize {
        let v: Vec<usize> = ps.into_iter().collect();
        self.f.big_coprod_mask(mask_of(&v))
    }

    fn and(&self, ps: &[usize]) -> usize {
        match ps.split_first() {
            None => self.f.top1(),
            Some((&first, rest)) => rest.iter().fold(first, |acc, &p| self.f.and1(acc, p)),
        }
    }

    fn imp(&self, a: usize, b: usize) -> usize {
        self.f.imp1(a, b)
    }

    /// Evidence for `⊤ ⊢ φ`.
    pub fn evidence(&self, phi: usize) -> Option<usize> {
        self.f.evidence_for(self.f.top1(), phi)
    }

    fn holds(&self, phi: usize) -> bool {
        self.evidence(phi).is_some()
    }

    fn show(&self, p: usize) -> &str {
        self.f.prop_name(p)
    }

    /// `∏∏(x∼y ⊃ y∼x)`.
    pub fn sym(&self, o: &EftObject) -> usize {
        let n = o.len();
        self.pi((0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| self.imp(o.sim(x, y), o.sim(y, x))))
    }

    /// `∏∏∏(x∼y ∧ y∼z ⊃ x∼z)`.
    pub fn trs(&self, o: &EftObject) -> usize {
        let n = o.len();
        let mut ps = Vec::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    ps.push(self.imp(self.f.and1(o.sim(x, y), o.sim(y, z)), o.sim(x, z)));
                }
            }
        }
        self.pi(ps)
    }

    pub fn validate_object(&self, o: &EftObject) -> CheckResult {
        let (s, t) = (self.sym(o), self.trs(o));
        match (self.evidence(s), self.evidence(t)) {
            (Some(es), Some(et)) => CheckResult::Verified(
                Witness::new(format!("object of carrier {}", o.len()))
                    .with_line(format!("sym = {} with evidence {}", self.show(s), self.f.ev_name(es)))
                    .with_line(format!("trs = {} with evidence {}", self.show(t), self.f.ev_name(et))),
            ),
            (None, _) => CheckResult::counterexample(format!("sym = {} is not evidenceable", self.show(s))),
            (_, None) => CheckResult::counterexample(format!("trs = {} is not evidenceable", self.show(t))),
        }
    }

    pub fn is_object(&self, o: &EftObject) -> bool {
        self.holds(self.sym(o)) && self.holds(self.trs(o))
    }

    pub fn ext(&self, m: &Morphism) -> usize {
        let (nx, ny) = (m.src.len(), m.dst.len());
        let mut ps = Vec::new();
        for x in 0..nx {
            for x2 in 0..nx {
                for y in 0..ny {
                    for y2 in 0..ny {
                        let ante = self.and(&[m.src.sim(x, x2), m.dst.sim(y, y2), m.at(x, y)]);
                        ps.push(self.imp(ante, m.at(x2, y2)));
                    }
                }
            }
        }
        self.pi(ps)
    }

    pub fn sv(&self, m: &Morphism) -> usize {
        let (nx, ny) = (m.src.len(), m.dst.len());
        let mut ps = Vec::new();
        for x in 0..nx {
            for y in 0..ny {
                for y2 in 0..ny {
                    let ante = self.and(&[m.src.ex(x), m.dst.ex(y), m.dst.ex(y2), m.at(x, y), m.at(x, y2)]);
                    ps.push(self.imp(ante, m.dst.sim(y, y2)));
                }
            }
        }
        self.pi(ps)
    }

    pub fn tot(&self, m: &Morphism) -> usize {
        let ny = m.dst.len();
        self.pi((0..m.src.len()).map(|x| {
            let some = self.coprod((0..ny).map(|y| self.f.and1(m.dst.ex(y), m.at(x, y))));
            self.imp(m.src.ex(x), some)
        }))
    }

    pub fn validate_fpred(&self, m: &Morphism) -> CheckResult {
        let mut w = Witness::new(format!("functional predicate {} → {}", m.src.len(), m.dst.len()));
        for (name, p) in [("ext", self.ext(m)), ("sv", self.sv(m)), ("tot", self.tot(m))] {
            match self.evidence(p) {
                Some(e) => w = w.with_line(format!("{name} = {} with evidence {}", self.show(p), self.f.ev_name(e))),
                None => return CheckResult::counterexample(format!("{name} = {} is not evidenceable", self.show(p))),
            }
        }
        CheckResult::Verified(w)
    }

    pub fn is_fpred(&self, m: &Morphism) -> bool {
        self.holds(self.ext(m)) && self.holds(self.sv(m)) && self.holds(self.tot(m))
    }

    /// `∏∏(ex(x, y) ⊃ (F(x,y) ⇔ G(x,y)))`.
    pub fn eq_prop(&self, a: &Morphism, b: &Morphism) -> usize {
        let (nx, ny) = (a.src.len(), a.dst.len());
        self.pi((0..nx).flat_map(|x| (0..ny).map(move |y| (x, y))).map(|(x, y)| {
            let ante = self.f.and1(a.src.ex(x), a.dst.ex(y));
            self.imp(ante, self.f.iff1(a.at(x, y), b.at(x, y)))
        }))
    }

    pub fn eq(&self, a: &Morphism, b: &Morphism) -> bool {
        a.src == b.src && a.dst == b.dst && self.holds(self.eq_prop(a, b))
    }

    pub fn check_eq(&self, a: &Morphism, b: &Morphism) -> CheckResult {
        if a.src != b.src || a.dst != b.dst {
            return CheckResult::counterexample("different source or target");
        }
        let p = self.eq_prop(a, b);
        match self.evidence(p) {
            Some(e) => CheckResult::verified(format!("eq = {} with evidence {}", self.show(p), self.f.ev_name(e))),
            None => CheckResult::counterexample(format!("eq = {} is not evidenceable", self.show(p))),
        }
    }

    /// `lift(f)(x, y) = f(x) ∼ y`, without the extensionality check.
    pub fn lift_raw(&self, f: &[usize], src: &EftObject, dst: &EftObject) -> Morphism {
        let ny = dst.len();
        Morphism {
            src: src.clone(),
            dst: dst.clone(),
            rel: (0..src.len()).flat_map(|x| (0..ny).map(move |y| dst.sim(f[x], y))).collect(),
        }
    }

    /// `∏∏(x∼x′ ⊃ f(x)∼f(x′))`.
    pub fn fext(&self, f: &[usize], src: &EftObject, dst: &EftObject) -> usize {
        let n = src.len();
        self.pi((0..n).flat_map(|x| (0..n).map(move |x2| (x, x2))).map(|(x, x2)| self.imp(src.sim(x, x2), dst.sim(f[x], f[x2]))))
    }

    pub fn lift_function(&self, f: &[usize], src: &EftObject, dst: &EftObject) -> Result<Morphism, CheckResult> {
        let n = src.len();
        if f.len() != n || f.iter().any(|&y| y >= dst.len()) {
            return Err(CheckResult::counterexample("function is not total on the carriers"));
        }
        if !self.holds(self.fext(f, src, dst)) {
            for x in 0..n {
                for x2 in 0..n {
                    if !self.holds(self.imp(src.sim(x, x2), dst.sim(f[x], f[x2]))) {
                        return Err(CheckResult::Counterexample(
                            Witness::new("not extensional").with_line(format!(
                                "x = {}, x′ = {}: {} ⊃ {} fails",
                                src.names[x],
                                src.names[x2],
                                self.show(src.sim(x, x2)),
                                self.show(dst.sim(f[x], f[x2]))
                            )),
                        ));
                    }
                }
            }
            return Err(CheckResult::counterexample("fext is not evidenceable (uniformity)"));
        }
        Ok(self.lift_raw(f, src, dst))
    }

    pub fn identity(&self, o: &EftObject) -> Morphism {
        let id: Vec<usize> = (0..o.len()).collect();
        self.lift_raw(&id, o, o)
    }

    /// `G ∘ F (x, z) = ∐_y (ex(y) ∧ F(x,y) ∧ G(y,z))`.
    pub fn compose(&self, g: &Morphism, f: &Morphism) -> Morphism {
        let (nx, ny, nz) = (f.src.len(), f.dst.len(), g.dst.len());
        let mut rel = Vec::with_capacity(nx * nz);
        for x in 0..nx {
            for z in 0..nz {
                rel.push(self.coprod((0..ny).map(|y| self.and(&[f.dst.ex(y), f.at(x, y), g.at(y, z)]))));
            }
        }
        Morphism {
            src: f.src.clone(),
            dst: g.dst.clone(),
            rel,
        }
    }

    pub fn terminal(&self) -> EftObject {
        let mut o = EftObject::new(vec![vec![self.f.top1()]]);
        o.names = vec!["*".into()];
        o
    }

    pub fn to_terminal(&self, o: &EftObject) -> Morphism {
        self.lift_raw(&vec![0; o.len()], o, &self.terminal())
    }

    pub fn product(&self, a: &EftObject, b: &EftObject) -> Product {
        let (na, nb) = (a.len(), b.len());
        let mut eq = Vec::with_capacity(na * nb * na * nb);
        let mut names = Vec::new();
        for x in 0..na {
            for y in 0..nb {
                names.push(format!("({},{})", a.names[x], b.names[y]));
                for x2 in 0..na {
                    for y2 in 0..nb {
                        eq.push(self.f.and1(a.sim(x, x2), b.sim(y, y2)));
                    }
                }
            }
        }
        let obj = EftObject { names, eq };
        let p1f: Vec<usize> = (0..na * nb).map(|i| i / nb).collect();
        let p2f: Vec<usize> = (0..na * nb).map(|i| i % nb).collect();
        Product {
            p1: self.lift_raw(&p1f, &obj, a),
            p2: self.lift_raw(&p2f, &obj, b),
            obj,
            right_len: nb,
        }
    }

    /// `⟨F, G⟩(w, (x, y)) = F(w, x) ∧ G(w, y)`.
    pub fn pairing(&self, p: &Product, f: &Morphism, g: &Morphism) -> Morphism {
        let nw = f.src.len();
        let n = p.obj.len();
        let rel = (0..nw)
            .flat_map(|w| (0..n).map(move |i| (w, i)))
            .map(|(w, i)| self.f.and1(f.at(w, i / p.right_len), g.at(w, i % p.right_len)))
            .collect();
        Morphism {
            src: f.src.clone(),
            dst: p.obj.clone(),
            rel,
        }
    }

    /// `(X, ≈)` with `x ≈ x′ = x∼x′ ∧ ∐_y (F(x,y) ∧ G(x,y))`, included by `id_X`.
    pub fn equalizer(&self, f: &Morphism, g: &Morphism) -> (EftObject, Morphism) {
        let x = &f.src;
        let n = x.len();
        let agree: Vec<usize> = (0..n)
            .map(|i| self.coprod((0..f.dst.len()).map(|y| self.f.and1(f.at(i, y), g.at(i, y)))))
            .collect();
        let eq = (0..n * n).map(|k| self.f.and1(x.eq[k], agree[k / n])).collect();
        let e = EftObject {
            names: x.names.clone(),
            eq,
        };
        let id: Vec<usize> = (0..n).collect();
        let inc = self.lift_raw(&id, &e, x);
        (e, inc)
    }

    /// `(Φ, ⇔)`.
    pub fn omega(&self) -> EftObject {
        let props: Vec<usize> = self.f.props().collect();
        EftObject {
            names: props.iter().map(|&p| self.show(p).to_string()).collect(),
            eq: props
                .iter()
                .flat_map(|&a| props.iter().map(move |&b| (a, b)))
                .map(|(a, b)| self.f.iff1(a, b))
                .collect(),
        }
    }

    /// `true(*, φ) = ⊤ ⇔ φ`.
    pub fn true_arrow(&self) -> Morphism {
        self.lift_raw(&[self.f.top1()], &self.terminal(), &self.omega())
    }

    /// `∐_a (ex(a) ∧ m(a, x))`: where the subobject lives.
    pub fn image_pred(&self, m: &Morphism) -> Vec<usize> {
        (0..m.dst.len())
            .map(|x| self.coprod((0..m.src.len()).map(|a| self.f.and1(m.src.ex(a), m.at(a, x)))))
            .collect()
    }

    /// `χ_m`, the lift of `x ↦ ∐_a (ex(a) ∧ m(a, x))` into `(Φ, ⇔)`.
    pub fn classify(&self, m: &Morphism) -> Result<Morphism, CheckResult> {
        self.lift_function(&self.image_pred(m), &m.dst, &self.omega())
    }

    /// `χ(x) = true`: `∐_φ (χ(x, φ) ∧ (⊤ ⇔ φ))`.
    pub fn truth_pred(&self, chi: &Morphism) -> Vec<usize> {
        let top = self.f.top1();
        (0..chi.src.len())
            .map(|x| self.coprod(self.f.props().map(|p| self.f.and1(chi.at(x, p), self.f.iff1(top, p)))))
            .collect()
    }

    /// `i_m : (X, ∼_m) ↪ (X, ∼)` with `x ∼_m x′ = x∼x′ ∧ χ(x)`.
    pub fn canonical_subobject(&self, o: &EftObject, chi: &[usize]) -> Morphism {
        let n = o.len();
        let sub = EftObject {
            names: o.names.clone(),
            eq: (0..n * n).map(|k| self.f.and1(o.eq[k], chi[k / n])).collect(),
        };
        let id: Vec<usize> = (0..n).collect();
        self.lift_raw(&id, &sub, o)
    }

    /// `m` is monic: `m ∘ g = m ∘ h` implies `g = h` for all `g, h : T → S`
    /// with `T` among `tests`.
    pub fn is_mono(&self, m: &Morphism, tests: &[EftObject]) -> bool {
        tests.iter().all(|t| {
            let hs = self.hom(t, &m.src);
            let comps: Vec<Morphism> = hs.iter().map(|g| self.compose(m, g)).collect();
            (0..hs.len()).all(|i| (i + 1..hs.len()).all(|j| !self.eq(&comps[i], &comps[j])))
        })
    }

    /// Two-sided inverse among all functional predicates `dst → src`.
    pub fn inverse(&self, m: &Morphism) -> Option<Morphism> {
        let id_s = self.identity(&m.src);
        let id_d = self.identity(&m.dst);
        self.hom(&m.dst, &m.src)
            .into_iter()
            .find(|k| self.eq(&self.compose(k, m), &id_s) && self.eq(&self.compose(m, k), &id_d))
    }

    /// `m1` and `m2` are the same subobject: an iso `k` with `m2 ∘ k = m1`.
    pub fn same_subobject(&self, m1: &Morphism, m2: &Morphism) -> bool {
        self.hom(&m1.src, &m2.src)
            .iter()
            .any(|k| self.eq(&self.compose(m2, k), m1) && self.inverse(k).is_some())
    }

    /// Row-local parts of ext, sv and tot at `x`. A `∏` over a subset is
    /// implied by the `∏` over the whole set, so rows failing these cannot
    /// occur in a functional predicate.
    fn row_ok(&self, src: &EftObject, dst: &EftObject, x: usize, row: &[usize]) -> bool {
        let ny = dst.len();
        let mut ps = Vec::new();
        for y in 0..ny {
            for y2 in 0..ny {
                let ante = self.and(&[src.ex(x), dst.sim(y, y2), row[y]]);
                ps.push(self.imp(ante, row[y2]));
                let ante = self.and(&[src.ex(x), dst.ex(y), dst.ex(y2), row[y], row[y2]]);
                ps.push(self.imp(ante, dst.sim(y, y2)));
            }
        }
        let some = self.coprod((0..ny).map(|y| self.f.and1(dst.ex(y), row[y])));
        ps.push(self.imp(src.ex(x), some));
        self.holds(self.pi(ps))
    }

    /// Every functional predicate between two objects, in lexicographic table order.
    pub fn enumerate_fpreds(&self, src: &EftObject, dst: &EftObject) -> Vec<Morphism> {
        let rows = crate::tripos::all_maps(dst.len(), self.f.num_props());
        let cands: Vec<Vec<&Vec<usize>>> = (0..src.len())
            .map(|x| rows.iter().filter(|r| self.row_ok(src, dst, x, r)).collect())
            .collect();
        let mut out = Vec::new();
        if cands.iter().any(|c| c.is_empty()) {
            return out;
        }
        let mut pick = vec![0usize; src.len()];
        loop {
            let m = Morphism {
                src: src.clone(),
                dst: dst.clone(),
                rel: pick.iter().enumerate().flat_map(|(x, &i)| cands[x][i].iter().copied()).collect(),
            };
            if self.is_fpred(&m) {
                out.push(m);
            }
            let mut x = src.len();
            loop {
                if x == 0 {
                    return out;
                }
                x -= 1;
                pick[x] += 1;
                if pick[x] < cands[x].len() {
                    break;
                }
                pick[x] = 0;
            }
        }
    }

    /// Least prop id equivalent to `p`.
    pub fn canonical(&self, p: usize) -> usize {
        self.f.props().find(|&q| self.f.equiv(q, p)).unwrap_or(p)
    }

    /// One representative per morphism: the strict predicates, whose cells
    /// entail `ex(x) ∧ ex(y)`, with cells up to equivalence. Every functional
    /// predicate `F` is equal to its strict part `F ∧ ex(x) ∧ ex(y)`, and
    /// strict predicates are equal exactly when their cells are equivalent.
    pub fn hom(&self, src: &EftObject, dst: &EftObject) -> Vec<Morphism> {
        let canon: Vec<usize> = {
            let mut v: Vec<usize> = self.f.props().map(|p| self.canonical(p)).collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let ny = dst.len();
        let cells: Vec<Vec<usize>> = (0..src.len() * ny)
            .map(|k| {
                let bound = self.f.and1(src.ex(k / ny), dst.ex(k % ny));
                canon.iter().copied().filter(|&p| self.f.leq(p, bound)).collect()
            })
            .collect();
        let rows: Vec<Vec<Vec<usize>>> = (0..src.len())
            .map(|x| {
                let mut out = Vec::new();
                let mut pick = vec![0usize; ny];
                loop {
                    let row: Vec<usize> = (0..ny).map(|y| cells[x * ny + y][pick[y]]).collect();
                    if self.row_ok(src, dst, x, &row) {
                        out.push(row);
                    }
                    let mut y = ny;
                    loop {
                        if y == 0 {
                            return out;
                        }
                        y -= 1;
                        pick[y] += 1;
                        if pick[y] < cells[x * ny + y].len() {
                            break;
                        }
                        pick[y] = 0;
                    }
                }
            })
            .collect();
        let mut out = Vec::new();
        if rows.iter().any(|r| r.is_empty()) {
            return out;
        }
        let mut pick = vec![0usize; src.len()];
        loop {
            let m = Morphism {
                src: src.clone(),
                dst: dst.clone(),
                rel: pick.iter().enumerate().flat_map(|(x, &i)| rows[x][i].iter().copied()).collect(),
            };
            if self.is_fpred(&m) {
                out.push(m);
            }
            let mut x = src.len();
            loop {
                if x == 0 {
                    return out;
                }
                x -= 1;
                pick[x] += 1;
                if pick[x] < rows[x].len() {
                    break;
                }
                pick[x] = 0;
            }
        }
    }

    /// `hom` by brute force: every functional predicate, deduplicated by `eq`.
    pub fn hom_exhaustive(&self, src: &EftObject, dst: &EftObject) -> Vec<Morphism> {
        let mut reps: Vec<Morphism> = Vec::new();
        for m in self.enumerate_fpreds(src, dst) {
            if !reps.iter().any(|r| self.eq(r, &m)) {
                reps.push(m);
            }
        }
        reps
    }

    /// Every object on carriers `1..=max` whose equality table validates.
    pub fn enumerate_objects(&self, max: usize) -> Vec<EftObject> {
        let np = self.f.num_props();
        let mut out = Vec::new();
        for n in 1..=max {
            let cells = n * n;
            let mut eq = vec![0usize; cells];
            loop {
                let o = EftObject {
                    names: (0..n).map(|i| format!("x{i}")).collect(),
                    eq: eq.clone(),
                };
                if self.is_object(&o) {
                    out.push(o);
                }
                let mut i = cells;
                let done = loop {
                    if i == 0 {
                        break true;
                    }
                    i -= 1;
                    eq[i] += 1;
                    if eq[i] < np {
                        break false;
                    }
                    eq[i] = 0;
                };
                if done {
                    break;
                }
            }
        }
        out
    }

    pub fn describe(&self, o: &EftObject) -> String {
        let n = o.len();
        let rows: Vec<String> = (0..n)
            .map(|x| (0..n).map(|y| self.show(o.sim(x, y)).to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        format!("{{{}}} ∼ [{}]", o.names.join(","), rows.join("; "))
    }

    pub fn describe_morphism(&self, m: &Morphism) -> String {
        let ny = m.dst.len();
        let rows: Vec<String> = (0..m.src.len())
            .map(|x| (0..ny).map(|y| self.show(m.at(x, y)).to_string()).collect::<Vec<_>>().join(" "))
            .collect();
        format!("[{}]", rows.join("; "))
    }
}

/// Hom-sets between a fixed list of objects, with composition as a table on
/// representatives.
pub struct HomTable {
    pub hom: Vec<Vec<Vec<Morphism>>>,
}

impl HomTable {
    pub fn build(eft: &Eft, objs: &[EftObject]) -> HomTable {
        HomTable {
            hom: objs.iter().map(|a| objs.iter().map(|b| eft.hom(a, b)).collect()).collect(),
        }
    }

    fn class_of(&self, eft: &Eft, a: usize, b: usize, m: &Morphism) -> Option<usize> {
        self.hom[a][b].iter().position(|r| eft.eq(r, m))
    }
}

fn fail(label: &str, lines: Vec<String>) -> CheckResult {
    CheckResult::Counterexample(Witness::new(label).with_lines(lines))
}

/// Identity, closure, well-definedness on classes, and associativity.
pub fn check_category_laws(eft: &Eft, objs: &[EftObject]) -> CheckResult {
    let table = HomTable::build(eft, objs);
    let n = objs.len();
    let mut comp: HashMap<(usize, usize, usize, usize, usize), usize> = HashMap::new();
    let mut count = 0u64;
    for a in 0..n {
        let id_a = eft.identity(&objs[a]);
        if !eft.is_fpred(&id_a) {
            return fail("identity is not functional", vec![eft.describe(&objs[a])]);
        }
        for b in 0..n {
            for (fi, f) in table.hom[a][b].iter().enumerate() {
                let id_b = eft.identity(&objs[b]);
                if !eft.eq(&eft.compose(f, &id_a), f) || !eft.eq(&eft.compose(&id_b, f), f) {
                    return fail("identity law fails", vec![eft.describe_morphism(f)]);
                }
                for c in 0..n {
                    for (gi, g) in table.hom[b][c].iter().enumerate() {
                        let gf = eft.compose(g, f);
                        if !eft.is_fpred(&gf) {
                            return fail("composite is not functional", vec![eft.describe_morphism(&gf)]);
                        }
                        match table.class_of(eft, a, c, &gf) {
                            Some(k) => {
                                comp.insert((a, b, c, fi, gi), k);
                            }
                            None => return fail("composite outside the enumerated hom-set", vec![]),
                        }
                    }
                }
            }
        }
    }
    // Well-definedness: every member of a class composes into the same class.
    for a in 0..n {
        for b in 0..n {
            for f in eft.enumerate_fpreds(&objs[a], &objs[b]) {
                let fi = table.class_of(eft, a, b, &f).expect("enumerated");
                for c in 0..n {
                    for (gi, g) in table.hom[b][c].iter().enumerate() {
                        count += 1;
                        let k = comp[&(a, b, c, fi, gi)];
                        if !eft.eq(&eft.compose(g, &f), &table.hom[a][c][k]) {
                            return fail("composition depends on the representative", vec![eft.describe_morphism(&f)]);
                        }
                    }
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for fi in 0..table.hom[a][b].len() {
                        for gi in 0..table.hom[b][c].len() {
                            let gf = comp[&(a, b, c, fi, gi)];
                            for hi in 0..table.hom[c][d].len() {
                                count += 1;
                                let hg = comp[&(b, c, d, gi, hi)];
                                if comp[&(a, c, d, gf, hi)] != comp[&(a, b, d, fi, hg)] {
                                    return fail(
                                        "associativity fails",
                                        vec![format!("objects {a} {b} {c} {d}, morphisms {fi} {gi} {hi}")],
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let morphisms: usize = table.hom.iter().flatten().map(|h| h.len()).sum();
    CheckResult::verified(format!(
        "category laws over {n} objects, {morphisms} morphisms, {count} instances ({})",
        eft.frame().name()
    ))
}

/// `lift(g ∘ f) = lift g ∘ lift f` for every pair of extensional functions.
pub fn check_lift_functoriality(eft: &Eft, objs: &[EftObject]) -> CheckResult {
    let mut count = 0u64;
    let functions = |a: &EftObject, b: &EftObject| -> Vec<Vec<usize>> {
        crate::tripos::all_maps(a.len(), b.len())
            .into_iter()
            .filter(|f| eft.lift_function(f, a, b).is_ok())
            .collect()
    };
    for a in objs {
        for b in objs {
            let fs = functions(a, b);
            for c in objs {
                let gs = functions(b, c);
                for f in &fs {
                    for g in &gs {
                        count += 1;
                        let gf: Vec<usize> = f.iter().map(|&y| g[y]).collect();
                        let lifted = match eft.lift_function(&gf, a, c) {
                            Ok(m) => m,
                            Err(r) => return r,
                        };
                        let composed = eft.compose(&eft.lift_raw(g, b, c), &eft.lift_raw(f, a, b));
                        if !eft.eq(&lifted, &composed) {
                            return fail("lift is not functorial", vec![format!("f = {f:?}, g = {g:?}")]);
                        }
                    }
                }
            }
        }
    }
    CheckResult::verified(format!("lifting preserves composition on {count} pairs"))
}

pub fn check_terminal(eft: &Eft, objs: &[EftObject]) -> CheckResult {
    let one = eft.terminal();
    for o in objs {
        let h = eft.hom(o, &one);
        if h.len() != 1 || !eft.eq(&h[0], &eft.to_terminal(o)) {
            return fail("terminal fails", vec![eft.describe(o), format!("{} morphisms", h.len())]);
        }
    }
    CheckResult::verified(format!("unique morphism to 1 from each of {} objects", objs.len()))
}

/// Pairing exists, commutes with the projections and is unique, with the
/// test object ranging over `objs`.
pub fn check_products(eft: &Eft, objs: &[EftObject]) -> CheckResult {
    let mut count = 0u64;
    for a in objs {
        for b in objs {
            let p = eft.product(a, b);
            if !eft.is_object(&p.obj) || !eft.is_fpred(&p.p1) || !eft.is_fpred(&p.p2) {
                return fail("product is not an object with projections", vec![eft.describe(&p.obj)]);
            }
            for t in objs {
                let fs = eft.hom(t, a);
                let gs = eft.hom(t, b);
                // Each mediating class projects to exactly one cone.
                let mut hits = vec![0usize; fs.len() * gs.len()];
                for h in eft.hom(t, &p.obj) {
                    let i = fs.iter().position(|f| eft.eq(&eft.compose(&p.p1, &h), f));
                    let j = gs.iter().position(|g| eft.eq(&eft.compose(&p.p2, &h), g));
                    match (i, j) {
                        (Some(i), Some(j)) => hits[i * gs.len() + j] += 1,
                        _ => return fail("projection of a map into the product", vec![eft.describe_morphism(&h)]),
                    }
                }
                for (fi, f) in fs.iter().enumerate() {
                    for (gi, g) in gs.iter().enumerate() {
                        count += 1;
                        let fg = eft.pairing(&p, f, g);
                        if !eft.is_fpred(&fg)
                            || !eft.eq(&eft.compose(&p.p1, &fg), f)
                            || !eft.eq(&eft.compose(&p.p2, &fg), g)
                        {
                            return fail(
                                "pairing fails",
                                vec![eft.describe_morphism(f), eft.describe_morphism(g)],
                            );
                        }
                        let mediating = hits[fi * gs.len() + gi];
                        if mediating != 1 {
                            return fail("mediating morphism not unique", vec![format!("{mediating} candidates")]);
                        }
                    }
                }
            }
        }
    }
    CheckResult::verified(format!("products over {} objects, {count} cones", objs.len()))
}

/// Equalizer inclusions equalize, and every equalizing map factors uniquely.
pub fn check_equalizers(eft: &Eft, objs: &[EftObject]) -> CheckResult {
    let mut count = 0u64;
    for x in objs {
        for y in objs {
            let hs = eft.hom(x, y);
            for (i, f) in hs.iter().enumerate() {
                for g in &hs[i..] {
                    let (e, inc) = eft.equalizer(f, g);
                    if !eft.is_object(&e) || !eft.is_fpred(&inc) {
                        return fail("equalizer is not an object", vec![eft.describe(&e)]);
                    }
                    if !eft.eq(&eft.compose(f, &inc), &eft.compose(g, &inc)) {
                        return fail("inclusion does not equalize", vec![eft.describe(&e)]);
                    }
                    for t in objs {
                        let ks = eft.hom(t, &e);
                        for h in eft.hom(t, x) {
                            if !eft.eq(&eft.compose(f, &h), &eft.compose(g, &h)) {
                                continue;
                            }
                            count += 1;
                            let factors = ks.iter().filter(|k| eft.eq(&eft.compose(&inc, k), &h)).count();
                            if factors != 1 {
                                return fail(
                                    "equalizer factorization",
                                    vec![eft.describe_morphism(&h), format!("{factors} factorizations")],
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    CheckResult::verified(format!("equalizers over {} objects, {count} equalizing maps", objs.len()))
}

/// For every mono into an object of `objs` (monicity tested against
/// `objs`): `χ_m` is functional, the canonical subobject of its truth
/// predicate is `m`, every classifier of `m` is `χ_m`, and classifying the
/// canonical subobject of any `χ` returns `χ` on existents.
pub fn check_classifier(eft: &Eft, objs: &[EftObject]) -> CheckResult {
    let omega = eft.omega();
    if !eft.is_object(&omega) || !eft.is_fpred(&eft.true_arrow()) {
        return fail("(Φ, ⇔) with true is not an object", vec![]);
    }
    let mut monos = 0u64;
    for x in objs {
        let chis = eft.hom(x, &omega);
        for s in objs {
            for m in eft.hom(s, x) {
                if !eft.is_mono(&m, objs) {
                    continue;
                }
                monos += 1;
                let chi = match eft.classify(&m) {
                    Ok(c) => c,
                    Err(r) => return r,
                };
                let back = eft.canonical_subobject(x, &eft.truth_pred(&chi));
                if !eft.same_subobject(&m, &back) || !eft.same_subobject(&back, &m) {
                    return fail(
                        "pullback of true along χ_m is not m",
                        vec![eft.describe_morphism(&m), eft.describe_morphism(&chi)],
                    );
                }
                for other in &chis {
                    let sub = eft.canonical_subobject(x, &eft.truth_pred(other));
                    if eft.same_subobject(&m, &sub) && !eft.eq(other, &chi) {
                        return fail(
                            "classifier not unique",
                            vec![eft.describe_morphism(&chi), eft.describe_morphism(other)],
                        );
                    }
                }
            }
        }
        for chi in &chis {
            let m = eft.canonical_subobject(x, &eft.truth_pred(chi));
            match eft.classify(&m) {
                Ok(back) if eft.eq(&back, chi) => {}
                _ => {
                    return fail(
                        "round trip χ ↦ i_χ ↦ χ fails",
                        vec![eft.describe(x), eft.describe_morphism(chi)],
                    )
                }
            }
        }
    }
    CheckResult::verified(format!("subobject classifier on {monos} monos over {} objects", objs.len()))
}

/// Every universal-property check over the objects on carriers `≤ max`.
pub fn check_topos(eft: &Eft, max: usize) -> Vec<(&'static str, CheckResult)> {
    let objs = eft.enumerate_objects(max);
    vec![
        ("category laws", check_category_laws(eft, &objs)),
        ("lift functoriality", check_lift_functoriality(eft, &objs)),
        ("terminal", check_terminal(eft, &objs)),
        ("products", check_products(eft, &objs)),
        ("equalizers", check_equalizers(eft, &objs)),
        ("subobject classifier", check_classifier(eft, &objs)),
    ]
}

#[derive(Deserialize)]
struct ObjectFile {
    carrier: Vec<String>,
    eq: Vec<Vec<String>>,
}

#[derive(Deserialize)]
struct MorphismFile {
    source: ObjectFile,
    target: ObjectFile,
    rel: Option<Vec<Vec<String>>>,
    function: Option<Vec<String>>,
}

fn object_from(f: &FiniteFrame, o: ObjectFile) -> Result<EftObject, ToposError> {
    let n = o.carrier.len();
    if o.eq.len() != n || o.eq.iter().any(|r| r.len() != n) {
        return Err(ToposError::Format(format!("eq must be {n} × {n}")));
    }
    let mut eq = Vec::new();
    for row in &o.eq {
        for p in row {
            eq.push(f.prop(p).map_err(|e| ToposError::Format(e.to_string()))?);
        }
    }
    Ok(EftObject { names: o.carrier, eq })
}

/// Parses an object file (`carrier = [...]`, `eq = [[...], ...]`, entries are proposition names).
pub fn parse_object(f: &FiniteFrame, text: &str) -> Result<EftObject, ToposError> {
    let o: ObjectFile = toml::from_str(text).map_err(|e| ToposError::Format(e.to_string()))?;
    object_from(f, o)
}

/// Parses a morphism file: `[source]`, `[target]` and either a `rel` table
/// or a representing `function` listing target element names.
pub fn parse_morphism(eft: &Eft, text: &str) -> Result<Morphism, ToposError> {
    let m: MorphismFile = toml::from_str(text).map_err(|e| ToposError::Format(e.to_string()))?;
    let f = eft.frame();
    let src = object_from(f, m.source)?;
    let dst = object_from(f, m.target)?;
    match (m.rel, m.function) {
        (Some(rel), None) => {
            if rel.len() != src.len() || rel.iter().any(|r| r.len() != dst.len()) {
                return Err(ToposError::Format("rel has the wrong shape".into()));
            }
            let mut cells = Vec::new();
            for row in &rel {
                for p in row {
                    cells.push(f.prop(p).map_err(|e| ToposError::Format(e.to_string()))?);
                }
            }
            Ok(Morphism { src, dst, rel: cells })
        }
        (None, Some(func)) => {
            let idx: Result<Vec<usize>, _> = func
                .iter()
                .map(|y| {
                    dst.names
                        .iter()
                        .position(|n| n == y)
                        .ok_or_else(|| ToposError::Format(format!("unknown target element {y}")))
                })
                .collect();
            eft.lift_function(&idx?, &src, &dst)
                .map_err(|r| ToposError::Invalid(r.to_string()))
        }
        _ => Err(ToposError::Format("give exactly one of rel or function".into())),
    }
}

impl fmt::Display for EftObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::heyting_frame;
    use crate::heyting::{Builtin, HeytingAlgebra};

    fn chain3() -> FiniteFrame {
        heyting_frame(&HeytingAlgebra::builtin(Builtin::Chain3)).unwrap()
    }

    #[test]
    fn objects() {
        let f = chain3();
        let e = Eft::new(&f);
        let (z, h, one) = (f.prop("0").unwrap(), f.prop("h").unwrap(), f.prop("1").unwrap());
        assert!(e.validate_object(&EftObject::new(vec![vec![one]])).is_verified());
        let partial = EftObject::new(vec![vec![one, z], vec![z, h]]);
        assert!(e.validate_object(&partial).is_verified());
        let asym = EftObject::new(vec![vec![one, one], vec![z, one]]);
        assert!(e.validate_object(&asym).is_counterexample());
        assert_eq!(e.enumerate_objects(1).len(), 3);
        assert_eq!(e.enumerate_objects(2).len(), 3 + 14);
    }

    #[test]
    fn lifting() {
        let f = chain3();
        let e = Eft::new(&f);
        let (z, one) = (f.prop("0").unwrap(), f.prop("1").unwrap());
        let o = EftObject::new(vec![vec![one, z], vec![z, z]]);
        assert!(e.eq(&e.lift_function(&[0, 1], &o, &o).unwrap(), &e.identity(&o)));
        let r = e.lift_function(&[1, 0], &o, &o).unwrap_err();
        assert!(r.is_counterexample());
        assert!(r.witness().lines[0].contains("x = x0, x′ = x0"), "{r}");
        let m = e.lift_function(&[0, 0], &o, &e.terminal()).unwrap();
        assert!(e.validate_fpred(&m).is_verified());
    }

    #[test]
    fn composition_formula() {
        let f = chain3();
        let e = Eft::new(&f);
        let h = f.prop("h").unwrap();
        let one = f.prop("1").unwrap();
        let o = EftObject::new(vec![vec![one, h], vec![h, one]]);
        let id = e.identity(&o);
        let c = e.compose(&id, &id);
        // ∐_y (ex(y) ∧ x∼y ∧ y∼z) is the join over y in a Heyting frame.
        for x in 0..2 {
            for z in 0..2 {
                let expect = (0..2)
                    .map(|y| f.and1(f.and1(o.ex(y), o.sim(x, y)), o.sim(y, z)))
                    .fold(f.prop("0").unwrap(), |a, b| if f.leq(a, b) { b } else { a });
                assert_eq!(c.at(x, z), expect);
            }
        }
        assert!(e.check_eq(&c, &id).is_verified());
    }

    #[test]
    fn classifier_example() {
        let f = chain3();
        let e = Eft::new(&f);
        let (h, one) = (f.prop("h").unwrap(), f.prop("1").unwrap());
        let x = EftObject::new(vec![vec![one]]);
        let m = e.canonical_subobject(&x, &[h]);
        assert_eq!(m.src.sim(0, 0), h);
        let chi = e.classify(&m).unwrap();
        assert_eq!(e.truth_pred(&chi), vec![h]);
    }

    #[test]
    fn small_universal_properties() {
        let f = chain3();
        let e = Eft::new(&f);
        let objs = e.enumerate_objects(1);
        for r in [
            check_category_laws(&e, &objs),
            check_terminal(&e, &objs),
            check_products(&e, &objs),
            check_equalizers(&e, &objs),
            check_classifier(&e, &objs),
            check_lift_functoriality(&e, &objs),
        ] {
            assert!(r.is_verified(), "{r}");
        }
    }

    #[test]
    fn strict_representatives() {
        for b in [Builtin::Chain3, Builtin::Diamond4] {
            let f = heyting_frame(&HeytingAlgebra::builtin(b)).unwrap();
            let e = Eft::new(&f);
            let objs = e.enumerate_objects(2);
            for a in &objs {
                for c in &objs {
                    let strict = e.hom(a, c);
                    let all = e.hom_exhaustive(a, c);
                    assert_eq!(strict.len(), all.len());
                    assert!(all.iter().all(|m| strict.iter().any(|r| e.eq(r, m))));
                }
            }
        }
    }

    #[test]
    fn files() {
        let f = chain3();
        let e = Eft::new(&f);
        let o = parse_object(&f, "carrier = [\"a\", \"b\"]\neq = [[\"1\", \"0\"], [\"0\", \"h\"]]\n").unwrap();
        assert!(e.is_object(&o));
        let text = r#"
            function = ["a", "a"]
            [source]
            carrier = ["a", "b"]
            eq = [["1", "0"], ["0", "h"]]
            [target]
            carrier = ["a"]
            eq = [["1"]]
        "#;
        let m = parse_morphism(&e, text).unwrap();
        assert!(e.is_fpred(&m));
        assert!(parse_object(&f, "carrier = [\"a\"]\neq = [[\"q\"]]\n").is_err());
    }
}
