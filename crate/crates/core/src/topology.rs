//! Lawvere-Tierney topologies on evidenced frames: validation, closure and
//! density, separated objects and sheaves via j-singletons, and a
//! brute-force oracle deciding the sheaf condition by enumeration.
//!
//! Finite frames are checked exhaustively. On bounded frames `j` acts on
//! named propositions and the checks range over a sample.

use std::collections::HashMap;

use serde::Deserialize;

use crate::check::{CheckResult, Witness};
use crate::frame::{big_pi, find_evidence, iff, imp, mask_of, EvidencedFrame, FiniteFrame};
use crate::heyting::{Builtin, HeytingAlgebra};
use crate::topos::{Eft, EftObject, Morphism};

/// `j : Φ → Φ` on a finite frame, by table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    pub name: String,
    pub j: Vec<usize>,
}

impl Topology {
    pub fn apply(&self, p: usize) -> usize {
        self.j[p]
    }
}

pub fn identity_topology(f: &FiniteFrame) -> Topology {
    Topology {
        name: "id".into(),
        j: f.props().collect(),
    }
}

/// `¬¬φ` with `¬φ := φ ⊃ ⊥`.
pub fn double_negation(f: &FiniteFrame) -> Topology {
    let bot = f.bottom1();
    Topology {
        name: "dnn".into(),
        j: f.props().map(|p| f.imp1(f.imp1(p, bot), bot)).collect(),
    }
}

#[derive(Deserialize)]
struct TopologyFile {
    name: Option<String>,
    j: HashMap<String, String>,
}

/// `dnn`, `id`, or a TOML table `j = { "0" = "0", h = "1", … }` total on `Φ`.
pub fn parse_topology(f: &FiniteFrame, text: &str) -> Result<Topology, String> {
    match text.trim() {
        "dnn" => return Ok(double_negation(f)),
        "id" => return Ok(identity_topology(f)),
        _ => {}
    }
    let file: TopologyFile = toml::from_str(text).map_err(|e| e.to_string())?;
    let mut j = vec![None; f.num_props()];
    for (k, v) in &file.j {
        let a = f.prop(k).map_err(|e| e.to_string())?;
        j[a] = Some(f.prop(v).map_err(|e| e.to_string())?);
    }
    let j: Option<Vec<usize>> = j.into_iter().collect();
    Ok(Topology {
        name: file.name.unwrap_or_else(|| "table".into()),
        j: j.ok_or("j is not total on the propositions")?,
    })
}

fn pi(f: &FiniteFrame, ps: &[usize]) -> usize {
    f.big_pi_mask(mask_of(ps))
}

fn pairs(f: &FiniteFrame) -> impl Iterator<Item = (usize, usize)> + '_ {
    f.props().flat_map(move |a| f.props().map(move |b| (a, b)))
}

/// `inc`, `idm`, `prs`, and extensionality of `j` on `(Φ, ⇔)`.
pub fn topology_laws(f: &FiniteFrame, t: &Topology) -> Vec<(&'static str, usize)> {
    let j = |p| t.apply(p);
    let inc: Vec<usize> = f.props().map(|p| f.imp1(p, j(p))).collect();
    let idm: Vec<usize> = f.props().map(|p| f.imp1(j(j(p)), j(p))).collect();
    let prs: Vec<usize> = pairs(f).map(|(a, b)| f.iff1(j(f.and1(a, b)), f.and1(j(a), j(b)))).collect();
    let ext: Vec<usize> = pairs(f).map(|(a, b)| f.imp1(f.iff1(a, b), f.iff1(j(a), j(b)))).collect();
    vec![
        ("inc", pi(f, &inc)),
        ("idm", pi(f, &idm)),
        ("prs", pi(f, &prs)),
        ("ext", pi(f, &ext)),
    ]
}

pub fn validate_topology(f: &FiniteFrame, t: &Topology) -> CheckResult {
    let mut w = Witness::new(format!("topology {} on {}", t.name, f.name()));
    for (name, p) in topology_laws(f, t) {
        match f.evidence_for(f.top1(), p) {
            Some(e) => w = w.with_line(format!("{name} = {} with evidence {}", f.prop_name(p), f.ev_name(e))),
            None => {
                let bad = match name {
                    "inc" => f.props().find(|&q| !f.leq(q, t.apply(q))).map(|q| f.prop_name(q).to_string()),
                    "idm" => f
                        .props()
                        .find(|&q| !f.leq(t.apply(t.apply(q)), t.apply(q)))
                        .map(|q| f.prop_name(q).to_string()),
                    _ => None,
                };
                let mut c = Witness::new(format!("{name} = {} is not evidenceable", f.prop_name(p)));
                if let Some(q) = bad {
                    c = c.with_line(format!("fails at φ = {q}"));
                }
                return CheckResult::Counterexample(c);
            }
        }
    }
    CheckResult::Verified(w)
}

/// `∏∏(j(φ ⊃ ψ) ⊃ (jφ ⊃ jψ))`.
pub fn check_j_distribution(f: &FiniteFrame, t: &Topology) -> CheckResult {
    let rows: Vec<usize> = pairs(f)
        .map(|(a, b)| f.imp1(t.apply(f.imp1(a, b)), f.imp1(t.apply(a), t.apply(b))))
        .collect();
    let p = pi(f, &rows);
    match f.evidence_for(f.top1(), p) {
        Some(e) => CheckResult::verified(format!(
            "j-distribution for {} on {}: {} pairs, evidence {}",
            t.name,
            f.name(),
            rows.len(),
            f.ev_name(e)
        )),
        None => CheckResult::counterexample(format!("j-distribution for {} is not evidenceable", t.name)),
    }
}

/// Subobjects of `x` as strict extensional predicates with canonical cells:
/// `χ(x) ⊢ ex(x)` and `x∼x′ ∧ χ(x) ⊃ χ(x′)`. Each subobject occurs once.
pub fn subobjects(eft: &Eft, x: &EftObject) -> Vec<Vec<usize>> {
    let f = eft.frame();
    let n = x.len();
    let mut canon: Vec<usize> = f.props().map(|p| eft.canonical(p)).collect();
    canon.sort_unstable();
    canon.dedup();
    let cells: Vec<Vec<usize>> = (0..n)
        .map(|i| canon.iter().copied().filter(|&p| f.leq(p, x.ex(i))).collect())
        .collect();
    let mut out = Vec::new();
    for pick in crate::tripos::all_maps(n, 1usize.max(canon.len())) {
        if pick.iter().enumerate().any(|(i, &k)| k >= cells[i].len()) {
            continue;
        }
        let chi: Vec<usize> = pick.iter().enumerate().map(|(i, &k)| cells[i][k]).collect();
        let rows: Vec<usize> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| f.imp1(f.and1(x.sim(a, b), chi[a]), chi[b]))
            .collect();
        if f.evidenceable(pi(f, &rows)) {
            out.push(chi);
        }
    }
    out
}

/// `den(m) = ∏_x(ex(x) ⊃ j(χ_m(x)))`.
pub fn den(f: &FiniteFrame, t: &Topology, x: &EftObject, chi: &[usize]) -> usize {
    let rows: Vec<usize> = (0..x.len()).map(|i| f.imp1(x.ex(i), t.apply(chi[i]))).collect();
    pi(f, &rows)
}

pub fn is_dense(f: &FiniteFrame, t: &Topology, x: &EftObject, chi: &[usize]) -> CheckResult {
    let p = den(f, t, x, chi);
    match f.evidence_for(f.top1(), p) {
        Some(e) => CheckResult::verified(format!("den = {} with evidence {}", f.prop_name(p), f.ev_name(e))),
        None => CheckResult::counterexample(format!("den = {} is not evidenceable", f.prop_name(p))),
    }
}

/// The subobject classified by `j ∘ χ`.
pub fn closure(eft: &Eft, t: &Topology, x: &EftObject, chi: &[usize]) -> Morphism {
    let jchi: Vec<usize> = chi.iter().map(|&p| t.apply(p)).collect();
    eft.canonical_subobject(x, &jchi)
}

/// Density read off the closure: it is all of `x`.
pub fn dense_by_closure(eft: &Eft, t: &Topology, x: &EftObject, chi: &[usize]) -> bool {
    eft.same_subobject(&closure(eft, t, x, chi), &eft.identity(x))
}

/// `sep(A) = ∏∏(ex(a) ∧ ex(b) ∧ j(a∼b) ⊃ a∼b)`.
pub fn sep(f: &FiniteFrame, t: &Topology, a: &EftObject) -> usize {
    let n = a.len();
    let rows: Vec<usize> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| {
            let ante = f.and1(f.and1(a.ex(x), a.ex(y)), t.apply(a.sim(x, y)));
            f.imp1(ante, a.sim(x, y))
        })
        .collect();
    pi(f, &rows)
}

pub fn check_separated(f: &FiniteFrame, t: &Topology, a: &EftObject) -> CheckResult {
    let p = sep(f, t, a);
    if let Some(e) = f.evidence_for(f.top1(), p) {
        return CheckResult::verified(format!("sep = {} with evidence {}", f.prop_name(p), f.ev_name(e)));
    }
    let mut w = Witness::new(format!("sep = {} is not evidenceable", f.prop_name(p)));
    for x in 0..a.len() {
        for y in 0..a.len() {
            let ante = f.and1(f.and1(a.ex(x), a.ex(y)), t.apply(a.sim(x, y)));
            if !f.leq(ante, a.sim(x, y)) {
                w = w.with_line(format!(
                    "(a, b) = ({}, {}): ex(a) = {}, ex(b) = {}, j(a∼b) = {}, a∼b = {}",
                    a.names[x],
                    a.names[y],
                    f.prop_name(a.ex(x)),
                    f.prop_name(a.ex(y)),
                    f.prop_name(t.apply(a.sim(x, y))),
                    f.prop_name(a.sim(x, y))
                ));
            }
        }
    }
    CheckResult::Counterexample(w)
}

/// `ψ_x(a) = j(∐_s(ex(s) ∧ m(s, x) ∧ g(s, a)))`.
pub fn singleton(eft: &Eft, t: &Topology, m: &Morphism, g: &Morphism, x: usize, a: usize) -> usize {
    let f = eft.frame();
    let terms: Vec<usize> = (0..m.src.len())
        .map(|s| f.and1(f.and1(m.src.ex(s), m.at(s, x)), g.at(s, a)))
        .collect();
    t.apply(f.big_coprod_mask(mask_of(&terms)))
}

/// `∏_x(ex(x) ⊃ ∐_a(ex(a) ∧ ∏_b(ex(b) ⊃ (ψ_x(b) ⇔ j(a∼b)))))` for one
/// dense `m : S ↪ X` and `g : S → A`.
pub fn dsc(eft: &Eft, t: &Topology, a_obj: &EftObject, m: &Morphism, g: &Morphism) -> usize {
    let f = eft.frame();
    let na = a_obj.len();
    let rows: Vec<usize> = (0..m.dst.len())
        .map(|x| {
            let psi: Vec<usize> = (0..na).map(|b| singleton(eft, t, m, g, x, b)).collect();
            let cands: Vec<usize> = (0..na)
                .map(|a| {
                    let inner: Vec<usize> = (0..na)
                        .map(|b| f.imp1(a_obj.ex(b), f.iff1(psi[b], t.apply(a_obj.sim(a, b)))))
                        .collect();
                    f.and1(a_obj.ex(a), pi(f, &inner))
                })
                .collect();
            f.imp1(m.dst.ex(x), f.big_coprod_mask(mask_of(&cands)))
        })
        .collect();
    pi(f, &rows)
}

/// Separated, and `dsc` for every `(m, g)` in `family`.
pub fn check_sheaf(eft: &Eft, t: &Topology, a: &EftObject, family: &[(Morphism, Morphism)]) -> CheckResult {
    let f = eft.frame();
    let s = check_separated(f, t, a);
    if !s.is_verified() {
        return s;
    }
    for (m, g) in family {
        let p = dsc(eft, t, a, m, g);
        if f.evidence_for(f.top1(), p).is_none() {
            return CheckResult::Counterexample(
                Witness::new(format!("dsc = {} is not evidenceable", f.prop_name(p)))
                    .with_line(format!("m : {} ↪ {}", eft.describe(&m.src), eft.describe(&m.dst)))
                    .with_line(format!("g = {}", eft.describe_morphism(g))),
            );
        }
    }
    CheckResult::verified(format!("separated, dsc on {} dense (m, g) pairs", family.len()))
}

/// `f(x) ∼ g(x)` for maps given as predicates: `∐_a(ex(a) ∧ f(x,a) ∧ g(x,a))`.
fn agree_at(fr: &FiniteFrame, f: &Morphism, g: &Morphism, x: usize) -> usize {
    let terms: Vec<usize> = (0..f.dst.len())
        .map(|a| fr.and1(fr.and1(f.dst.ex(a), f.at(x, a)), g.at(x, a)))
        .collect();
    fr.big_coprod_mask(mask_of(&terms))
}

/// `leq(f, g) = ∏_x(x ∼_m x ⊃ f(x) ∼ g(x))` for a subobject given by `χ`.
pub fn leq_prop(eft: &Eft, x: &EftObject, chi: &[usize], f: &Morphism, g: &Morphism) -> usize {
    let fr = eft.frame();
    let rows: Vec<usize> = (0..x.len())
        .map(|i| fr.imp1(fr.and1(x.ex(i), chi[i]), agree_at(fr, f, g, i)))
        .collect();
    pi(fr, &rows)
}

pub fn leq_check(eft: &Eft, x: &EftObject, chi: &[usize], f: &Morphism, g: &Morphism) -> CheckResult {
    let fr = eft.frame();
    let p = leq_prop(eft, x, chi, f, g);
    match fr.evidence_for(fr.top1(), p) {
        Some(e) => CheckResult::verified(format!("leq = {} with evidence {}", fr.prop_name(p), fr.ev_name(e))),
        None => CheckResult::counterexample(format!("leq = {} is not evidenceable", fr.prop_name(p))),
    }
}

/// Objects up to renaming of the carrier: one per orbit under permutations.
pub fn up_to_iso(objs: &[EftObject]) -> Vec<EftObject> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for o in objs {
        let n = o.len();
        let key = permutations(n)
            .iter()
            .map(|p| (0..n * n).map(|k| o.sim(p[k / n], p[k % n])).collect::<Vec<_>>())
            .min()
            .unwrap_or_default();
        if seen.insert(key) {
            out.push(o.clone());
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Enumerated objects, their hom-sets, and strict keys for class lookup.
pub struct Universe<'a> {
    pub eft: &'a Eft<'a>,
    pub objs: Vec<EftObject>,
    /// Test objects for the sheaf condition: `objs` up to iso.
    pub tests: Vec<EftObject>,
    index: HashMap<Vec<usize>, usize>,
    homs: HashMap<(usize, usize), Vec<Morphism>>,
}

impl<'a> Universe<'a> {
    pub fn new(eft: &'a Eft<'a>, max: usize) -> Self {
        let objs = eft.enumerate_objects(max);
        let tests = up_to_iso(&objs);
        let index = objs.iter().enumerate().map(|(i, o)| (o.eq.clone(), i)).collect();
        Universe {
            eft,
            objs,
            tests,
            index,
            homs: HashMap::new(),
        }
    }

    pub fn index_of(&self, o: &EftObject) -> Option<usize> {
        self.index.get(&o.eq).copied()
    }

    pub fn hom(&mut self, a: usize, b: usize) -> &[Morphism] {
        let eft = self.eft;
        let objs = &self.objs;
        self.homs.entry((a, b)).or_insert_with(|| eft.hom(&objs[a], &objs[b]))
    }

    /// Cells `F(x,y) ∧ ex(x) ∧ ex(y)` up to equivalence: equal keys iff equal morphisms.
    pub fn key(&self, m: &Morphism) -> Vec<usize> {
        let f = self.eft.frame();
        let ny = m.dst.len();
        (0..m.rel.len())
            .map(|k| {
                let (x, y) = (k / ny, k % ny);
                self.eft.canonical(f.and1(f.and1(m.rel[k], m.src.ex(x)), m.dst.ex(y)))
            })
            .collect()
    }
}

/// Verdicts of the enumeration oracle for one object.
#[derive(Debug, Clone)]
pub struct OracleVerdict {
    pub injective: bool,
    pub bijective: bool,
    pub witness: Witness,
}

/// Decides separatedness and the sheaf condition by enumeration: for every
/// dense `m : S ↪ X` with `X` among the test objects, precomposition
/// `hom(X, A) → hom(S, A)` is injective (resp. bijective).
pub fn sheaf_oracle(u: &mut Universe, t: &Topology, a: usize) -> OracleVerdict {
    let eft = u.eft;
    let f = eft.frame();
    let mut injective = true;
    let mut bijective = true;
    let mut w = Witness::new(format!("oracle for {} under {}", eft.describe(&u.objs[a]), t.name));
    let tests = u.tests.clone();
    let mut dense = 0usize;
    for x in &tests {
        let xi = u.index_of(x).expect("enumerated");
        for chi in subobjects(eft, x) {
            if !f.evidenceable(den(f, t, x, &chi)) {
                continue;
            }
            dense += 1;
            let m = eft.canonical_subobject(x, &chi);
            let si = u.index_of(&m.src).expect("subobjects are objects");
            let from_x: Vec<Morphism> = u.hom(xi, a).to_vec();
            let to_s: Vec<Morphism> = u.hom(si, a).to_vec();
            let from_s: HashMap<Vec<usize>, usize> = to_s.iter().enumerate().map(|(i, g)| (u.key(g), i)).collect();
            let mut hit: Vec<Option<usize>> = vec![None; from_s.len()];
            for (i, h) in from_x.iter().enumerate() {
                let k = u.key(&eft.compose(h, &m));
                let j = *from_s.get(&k).expect("composite is a morphism");
                if let Some(prev) = hit[j] {
                    if injective {
                        w = w
                            .with_line(format!("not injective at m : {} ↪ {}", eft.describe(&m.src), eft.describe(x)))
                            .with_line(format!("f = {}", eft.describe_morphism(&from_x[prev])))
                            .with_line(format!("g = {}", eft.describe_morphism(h)));
                    }
                    injective = false;
                    bijective = false;
                } else {
                    hit[j] = Some(i);
                }
            }
            if bijective && hit.iter().any(|h| h.is_none()) {
                w = w.with_line(format!("not surjective at m : {} ↪ {}", eft.describe(&m.src), eft.describe(x)));
                bijective = false;
            }
            if !injective {
                return OracleVerdict {
                    injective,
                    bijective,
                    witness: w,
                };
            }
        }
    }
    w = w.with_line(format!("{dense} dense monos over {} test objects", tests.len()));
    OracleVerdict {
        injective,
        bijective,
        witness: w,
    }
}

/// Every dense `m : S ↪ X` with `X` among the test objects, paired with
/// every `g : S → A`.
pub fn sheaf_family(u: &mut Universe, t: &Topology, a: usize) -> Vec<(Morphism, Morphism)> {
    let eft = u.eft;
    let f = eft.frame();
    let mut out = Vec::new();
    for x in u.tests.clone() {
        for chi in subobjects(eft, &x) {
            if !f.evidenceable(den(f, t, &x, &chi)) {
                continue;
            }
            let m = eft.canonical_subobject(&x, &chi);
            let si = u.index_of(&m.src).expect("subobjects are objects");
            for g in u.hom(si, a).to_vec() {
                out.push((m.clone(), g));
            }
        }
    }
    out
}

/// Tallies for one oracle-equivalence run.
#[derive(Debug, Clone, Default)]
pub struct OracleTally {
    pub objects: usize,
    pub separated: usize,
    pub sheaves: usize,
    pub leq_instances: usize,
}

/// `check_separated` and `check_sheaf` against the oracle on every object
/// with carrier `≤ max`, and `leq_check` against composite equality on
/// carriers `≤ leq_max`.
pub fn check_oracle_equivalence(f: &FiniteFrame, t: &Topology, max: usize, leq_max: usize) -> (CheckResult, OracleTally) {
    let eft = Eft::new(f);
    let mut u = Universe::new(&eft, max);
    let mut tally = OracleTally::default();
    for a in 0..u.objs.len() {
        let obj = u.objs[a].clone();
        let oracle = sheaf_oracle(&mut u, t, a);
        let s = check_separated(f, t, &obj).is_verified();
        let sheaf = s && {
            let family = sheaf_family(&mut u, t, a);
            check_sheaf(&eft, t, &obj, &family).is_verified()
        };
        tally.objects += 1;
        tally.separated += s as usize;
        tally.sheaves += sheaf as usize;
        if s != oracle.injective || sheaf != oracle.bijective {
            return (
                CheckResult::Counterexample(
                    Witness::new(format!(
                        "disagreement on {}: sep {s}, sheaf {sheaf}; oracle injective {}, bijective {}",
                        eft.describe(&obj),
                        oracle.injective,
                        oracle.bijective
                    ))
                    .with_lines(oracle.witness.lines),
                ),
                tally,
            );
        }
    }
    let small = eft.enumerate_objects(leq_max);
    for x in &small {
        for chi in subobjects(&eft, x) {
            let m = eft.canonical_subobject(x, &chi);
            for a in &small {
                let hs = eft.hom(x, a);
                for g1 in &hs {
                    for g2 in &hs {
                        tally.leq_instances += 1;
                        let direct = eft.eq(&eft.compose(g1, &m), &eft.compose(g2, &m));
                        if leq_check(&eft, x, &chi, g1, g2).is_verified() != direct {
                            return (
                                CheckResult::Counterexample(
                                    Witness::new("leq_check disagrees with composite equality")
                                        .with_line(eft.describe(x))
                                        .with_line(format!("χ = {chi:?}"))
                                        .with_line(eft.describe_morphism(g1))
                                        .with_line(eft.describe_morphism(g2)),
                                ),
                                tally,
                            );
                        }
                    }
                }
            }
        }
    }
    (
        CheckResult::verified(format!(
            "{} / {}: {} objects ({} separated, {} sheaves), {} leq instances, all agree",
            f.name(),
            t.name,
            tally.objects,
            tally.separated,
            tally.sheaves,
            tally.leq_instances
        )),
        tally,
    )
}

/// `den(m)` against density of the closure, closure idempotence, and
/// j-distribution, over every subobject of every object on carriers `≤ max`.
pub fn check_density_lemmas(f: &FiniteFrame, t: &Topology, max: usize) -> CheckResult {
    let eft = Eft::new(f);
    let mut count = 0usize;
    for x in &eft.enumerate_objects(max) {
        for chi in subobjects(&eft, x) {
            count += 1;
            let by_den = is_dense(f, t, x, &chi).is_verified();
            if by_den != dense_by_closure(&eft, t, x, &chi) {
                return CheckResult::Counterexample(
                    Witness::new("den(m) disagrees with closure density")
                        .with_line(eft.describe(x))
                        .with_line(format!("χ = {chi:?}")),
                );
            }
            let once = closure(&eft, t, x, &chi);
            let jchi: Vec<usize> = chi.iter().map(|&p| t.apply(p)).collect();
            let twice = closure(&eft, t, x, &jchi);
            if !eft.same_subobject(&once, &twice) {
                return CheckResult::counterexample(format!("closure is not idempotent on {}", eft.describe(x)));
            }
        }
    }
    let dist = check_j_distribution(f, t);
    if !dist.is_verified() {
        return dist;
    }
    CheckResult::verified(format!(
        "{} / {}: den ⇔ closure density and idempotence on {count} subobjects; {}",
        f.name(),
        t.name,
        dist.witness().label
    ))
}

/// The builtin frames with their `id` and `¬¬` topologies.
pub fn builtin_instances() -> Vec<(FiniteFrame, Topology)> {
    let mut out = Vec::new();
    for b in Builtin::ALL {
        let f = crate::frame::heyting_frame(&HeytingAlgebra::builtin(b)).expect("builtin frame");
        out.push((f.clone(), identity_topology(&f)));
        out.push((f.clone(), double_negation(&f)));
    }
    out
}

/// Finds evidence for `⊤ ⊢ φ` among `candidates`; a miss is inconclusive,
/// since the candidates are a bounded search space.
fn bounded_row<F: EvidencedFrame>(f: &F, label: &str, phi: &F::Prop, candidates: &[F::Ev]) -> CheckResult {
    match find_evidence(f, phi, candidates) {
        Some(e) => CheckResult::verified(format!("{label}: evidence {}", f.show_ev(&e))),
        None => {
            let shown = f.show_prop(phi);
            let shown = match shown.char_indices().nth(200) {
                Some((i, _)) => format!("{}…", &shown[..i]),
                None => shown,
            };
            CheckResult::inconclusive(format!("{label}: no evidence among {} candidates for {shown}", candidates.len()))
        }
    }
}

fn squares<P>(props: &[P]) -> Vec<(&P, &P)> {
    props.iter().flat_map(|a| props.iter().map(move |b| (a, b))).collect()
}

/// `inc`, `idm` and `prs` for `j` acting on sampled propositions, each as
/// one `∏` over the sample.
pub fn validate_topology_bounded<F: EvidencedFrame>(
    f: &F,
    j: &dyn Fn(&F::Prop) -> F::Prop,
    props: &[F::Prop],
    candidates: &[F::Ev],
) -> CheckResult {
    let inc: Vec<F::Prop> = props.iter().map(|p| imp(f, p, &j(p))).collect();
    let idm: Vec<F::Prop> = props.iter().map(|p| imp(f, &j(&j(p)), &j(p))).collect();
    let prs: Vec<F::Prop> = squares(props)
        .into_iter()
        .map(|(a, b)| iff(f, &j(&f.and(a, b)), &f.and(&j(a), &j(b))))
        .collect();
    let rows = [("inc", inc), ("idm", idm), ("prs", prs)];
    CheckResult::all(
        format!("topology laws on {} sampled propositions", props.len()),
        rows.iter().map(|(name, ps)| bounded_row(f, name, &big_pi(f, ps), candidates)),
    )
}

/// `∏(j(φ ⊃ ψ) ⊃ (jφ ⊃ jψ))` over sampled pairs.
pub fn check_j_distribution_bounded<F: EvidencedFrame>(
    f: &F,
    j: &dyn Fn(&F::Prop) -> F::Prop,
    props: &[F::Prop],
    candidates: &[F::Ev],
) -> CheckResult {
    let dist: Vec<F::Prop> = squares(props)
        .into_iter()
        .map(|(a, b)| imp(f, &j(&imp(f, a, b)), &imp(f, &j(a), &j(b))))
        .collect();
    bounded_row(f, &format!("j-distribution on {} pairs", dist.len()), &big_pi(f, &dist), candidates)
}

/// On one-element objects `{x}` with `x∼x = ε` and subobject `χ`: `den`
/// is evidenced iff the inverse of the closure inclusion is total, i.e.
/// `ε ⊃ (ε ∧ jχ) ∧ ε` is evidenced. Both are searched among `candidates`.
pub fn check_density_bounded<F: EvidencedFrame>(
    f: &F,
    j: &dyn Fn(&F::Prop) -> F::Prop,
    props: &[F::Prop],
    candidates: &[F::Ev],
) -> CheckResult {
    let mut n = 0usize;
    let mut dense = 0usize;
    for ex in props {
        for chi in props {
            let by_den = find_evidence(f, &imp(f, ex, &j(chi)), candidates).is_some();
            let iso = imp(f, ex, &f.and(&f.and(ex, &j(chi)), ex));
            let by_closure = find_evidence(f, &iso, candidates).is_some();
            if by_den != by_closure {
                return CheckResult::inconclusive(format!(
                    "ε = {}, χ = {}: den found {by_den}, closure inverse found {by_closure}",
                    f.show_prop(ex),
                    f.show_prop(chi)
                ));
            }
            n += 1;
            dense += by_den as usize;
        }
    }
    CheckResult::verified(format!("den ⇔ closure density on {n} one-element instances ({dense} dense)"))
}
