//! Batch driver: suites of checks, line-oriented reports, and explanations
//! of individual records.
//!
//! A suite is a TOML file with a `name` and `[[check]]` entries. Every entry
//! names an operation, its inputs (builtin names or paths relative to the
//! suite file) and explicit bounds. All references are resolved before any
//! check runs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::characteristic::check_bridge;
use crate::check::{CheckResult, Witness};
use crate::cps::{check_dne, check_lift_rate, check_machine_equations, dne_regression};
use crate::frame::{heyting_frame, validate_frame, FiniteFrame};
use crate::heyting::{builtin_algebra, validate_algebra, HeytingAlgebra};
use crate::mca::{parse_prop_file, Bounds, MonadicCore, Prop, Tier};
use crate::term::S;
use crate::topology::{
    check_density_bounded, check_density_lemmas, check_j_distribution_bounded, check_oracle_equivalence,
    check_separated, check_sheaf, parse_topology, sheaf_family, sheaf_oracle, validate_topology,
    validate_topology_bounded, Topology, Universe,
};
use crate::topos::{check_topos, parse_object, Eft, EftObject};
use crate::tripos::{check_adjunctions, check_beck_chevalley, check_generic_element};

/// Largest carrier any finite enumeration may use.
pub const MAX_CARRIER: usize = 3;
/// Largest term size any bounded check may use.
pub const MAX_LEAVES: usize = 5;
pub const MAX_FUEL: u64 = 1_000_000;
pub const MAX_SAMPLES: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorkbenchError {
    #[error("{file}:{line}:{col}: {msg}")]
    Parse {
        file: String,
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{file}:{line}:{col}: scale guard: {msg}")]
    Scale {
        file: String,
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("unknown check id {0:?}")]
    UnknownId(String),
    #[error("report: {0}")]
    Report(String),
    #[error("{0}")]
    Io(String),
}

impl WorkbenchError {
    /// Every workbench error is a usage or input error.
    pub fn exit_code(&self) -> i32 {
        3
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    ValidateAlgebra,
    ValidateFrame,
    ValidateObject,
    ValidateTopology,
    CheckSeparated,
    CheckSheaf,
    OracleCompare,
    CheckDne,
    CheckTopos,
    CheckDensity,
    CheckTripos,
    CheckMachine,
    CheckLift,
    CheckBridge,
}

impl Op {
    pub const ALL: [Op; 14] = [
        Op::ValidateAlgebra,
        Op::ValidateFrame,
        Op::ValidateObject,
        Op::ValidateTopology,
        Op::CheckSeparated,
        Op::CheckSheaf,
        Op::OracleCompare,
        Op::CheckDne,
        Op::CheckTopos,
        Op::CheckDensity,
        Op::CheckTripos,
        Op::CheckMachine,
        Op::CheckLift,
        Op::CheckBridge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Op::ValidateAlgebra => "validate-algebra",
            Op::ValidateFrame => "validate-frame",
            Op::ValidateObject => "validate-object",
            Op::ValidateTopology => "validate-topology",
            Op::CheckSeparated => "check-separated",
            Op::CheckSheaf => "check-sheaf",
            Op::OracleCompare => "oracle-compare",
            Op::CheckDne => "check-dne",
            Op::CheckTopos => "check-topos",
            Op::CheckDensity => "check-density",
            Op::CheckTripos => "check-tripos",
            Op::CheckMachine => "check-machine",
            Op::CheckLift => "check-lift",
            Op::CheckBridge => "check-bridge",
        }
    }

    pub fn from_name(s: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|o| o.name() == s)
    }

    /// Keys of the finite bounds string; none means `exhaustive`.
    fn finite_keys(self) -> &'static [&'static str] {
        match self {
            Op::CheckSheaf | Op::CheckTopos | Op::CheckDensity => &["carrier"],
            Op::OracleCompare => &["carrier", "leq_carrier"],
            Op::CheckTripos => &["maps", "squares"],
            _ => &[],
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Verdict kinds as they appear in reports and expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Verified,
    Counterexample,
    Inconclusive,
}

impl Kind {
    pub fn of(r: &CheckResult) -> Kind {
        match r {
            CheckResult::Verified(_) => Kind::Verified,
            CheckResult::Counterexample(_) => Kind::Counterexample,
            CheckResult::Inconclusive(_) => Kind::Inconclusive,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Verified => "verified",
            Kind::Counterexample => "counterexample",
            Kind::Inconclusive => "inconclusive",
        }
    }

    pub fn from_name(s: &str) -> Option<Kind> {
        [Kind::Verified, Kind::Counterexample, Kind::Inconclusive]
            .into_iter()
            .find(|k| k.name() == s.to_ascii_lowercase())
    }
}

/// `exhaustive`, or `key=value` pairs with exactly the keys the op needs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FiniteBounds {
    pub values: Vec<(String, usize)>,
}

impl FiniteBounds {
    pub fn parse(op: Op, s: &str) -> Result<FiniteBounds, String> {
        let keys = op.finite_keys();
        let s = s.trim();
        if keys.is_empty() {
            return if s == "exhaustive" {
                Ok(FiniteBounds::default())
            } else {
                Err(format!("{op} on a finite frame takes bounds = \"exhaustive\", found {s:?}"))
            };
        }
        let mut values = Vec::new();
        for item in s.split_whitespace() {
            let (k, v) = item.split_once('=').ok_or_else(|| format!("expected key=value, found {item:?}"))?;
            if !keys.contains(&k) {
                return Err(format!("{op} does not take bound {k:?} (expects {})", keys.join(", ")));
            }
            let n: usize = v.parse().map_err(|_| format!("{k} is not a number"))?;
            values.push((k.to_string(), n));
        }
        for k in keys {
            if !values.iter().any(|(x, _)| x == k) {
                return Err(format!("missing bound {k}"));
            }
        }
        Ok(FiniteBounds { values })
    }

    pub fn get(&self, key: &str) -> usize {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| *v).unwrap_or(0)
    }

    fn guard(&self) -> Result<(), String> {
        for (k, v) in &self.values {
            let cap = match k.as_str() {
                "maps" => 4,
                _ => MAX_CARRIER,
            };
            if *v > cap {
                return Err(format!("{k}={v} exceeds the ceiling {cap}"));
            }
        }
        Ok(())
    }
}

fn guard_bounds(b: &Bounds) -> Result<(), String> {
    if b.max_leaves > MAX_LEAVES || b.pool_leaves > MAX_LEAVES {
        return Err(format!("term size above the ceiling {MAX_LEAVES}"));
    }
    if b.fuel > MAX_FUEL {
        return Err(format!("fuel {} exceeds the ceiling {MAX_FUEL}", b.fuel));
    }
    Ok(())
}

/// Resolved inputs of one check.
#[derive(Debug, Clone)]
enum Target {
    Algebra(HeytingAlgebra),
    Finite {
        frame: FiniteFrame,
        topology: Option<Topology>,
        object: Option<EftObject>,
        bounds: FiniteBounds,
    },
    Bounded {
        tier: Tier,
        bounds: Bounds,
        props: Option<Vec<Prop>>,
    },
}

/// One check of a suite with its references resolved.
#[derive(Debug, Clone)]
pub struct CheckSpec {
    pub id: String,
    pub op: Op,
    /// `key=value` list of the references as written.
    pub inputs: String,
    pub bounds: String,
    pub expect: Option<Kind>,
    target: Target,
    samples: usize,
    seed: u64,
}

#[derive(Debug, Clone)]
pub struct Suite {
    pub name: String,
    /// Path of the suite file, or `builtin:NAME`.
    pub source: String,
    pub checks: Vec<CheckSpec>,
    /// Replay command used verbatim instead of `run-suite --only`.
    pub replay: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    name: String,
    #[serde(default)]
    check: Vec<CheckEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckEntry {
    id: Spanned<String>,
    op: Spanned<String>,
    frame: Option<Spanned<String>>,
    topology: Option<Spanned<String>>,
    object: Option<Spanned<String>>,
    props: Option<Spanned<String>>,
    bounds: Option<Spanned<String>>,
    expect: Option<Spanned<String>>,
    samples: Option<Spanned<usize>>,
    seed: Option<u64>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

struct Ctx<'a> {
    file: &'a str,
    text: &'a str,
    dir: PathBuf,
}

impl Ctx<'_> {
    fn err(&self, span: std::ops::Range<usize>, msg: impl Into<String>) -> WorkbenchError {
        let (line, col) = line_col(self.text, span.start);
        WorkbenchError::Parse {
            file: self.file.to_string(),
            line,
            col,
            msg: msg.into(),
        }
    }

    fn scale(&self, span: std::ops::Range<usize>, msg: impl Into<String>) -> WorkbenchError {
        let (line, col) = line_col(self.text, span.start);
        WorkbenchError::Scale {
            file: self.file.to_string(),
            line,
            col,
            msg: msg.into(),
        }
    }

    fn read(&self, r: &Spanned<String>) -> Result<String, WorkbenchError> {
        let path = self.dir.join(r.get_ref());
        std::fs::read_to_string(&path).map_err(|e| self.err(r.span(), format!("cannot read {}: {e}", path.display())))
    }
}

/// Parses and resolves a suite file. `file` names the source in errors and replay lines.
pub fn parse_suite(text: &str, file: &str, dir: &Path) -> Result<Suite, WorkbenchError> {
    let ctx = Ctx {
        file,
        text,
        dir: dir.to_path_buf(),
    };
    let raw: SuiteFile = toml::from_str(text).map_err(|e| {
        let span = e.span().unwrap_or(0..0);
        ctx.err(span, e.message().to_string())
    })?;
    let mut checks = Vec::new();
    for entry in &raw.check {
        let spec = resolve(&ctx, entry)?;
        if checks.iter().any(|c: &CheckSpec| c.id == spec.id) {
            return Err(ctx.err(entry.id.span(), format!("duplicate check id {:?}", spec.id)));
        }
        checks.push(spec);
    }
    Ok(Suite {
        name: raw.name,
        source: file.to_string(),
        checks,
        replay: None,
    })
}

/// Reads and resolves a suite from disk, or a builtin given as `builtin:NAME`.
pub fn load_suite(path: &str) -> Result<Suite, WorkbenchError> {
    if let Some(name) = path.strip_prefix("builtin:") {
        return builtin_suite(name).ok_or_else(|| WorkbenchError::Io(format!("no builtin suite {name:?}")));
    }
    let text = std::fs::read_to_string(path).map_err(|e| WorkbenchError::Io(format!("cannot read {path}: {e}")))?;
    let dir = Path::new(path).parent().unwrap_or(Path::new("."));
    parse_suite(&text, path, dir)
}

fn resolve(ctx: &Ctx, e: &CheckEntry) -> Result<CheckSpec, WorkbenchError> {
    let op = Op::from_name(e.op.get_ref()).ok_or_else(|| {
        let known: Vec<&str> = Op::ALL.iter().map(|o| o.name()).collect();
        ctx.err(e.op.span(), format!("unknown op {:?} (one of {})", e.op.get_ref(), known.join(", ")))
    })?;
    let bounds = e
        .bounds
        .as_ref()
        .ok_or_else(|| ctx.err(e.id.span(), format!("check {:?} has no bounds", e.id.get_ref())))?;
    let expect = match &e.expect {
        Some(x) => Some(
            Kind::from_name(x.get_ref())
                .ok_or_else(|| ctx.err(x.span(), format!("unknown verdict {:?}", x.get_ref())))?,
        ),
        None => None,
    };
    let samples = match &e.samples {
        Some(s) if *s.get_ref() > MAX_SAMPLES => {
            return Err(ctx.scale(s.span(), format!("{} samples exceed the ceiling {MAX_SAMPLES}", s.get_ref())))
        }
        Some(s) => *s.get_ref(),
        None if op == Op::CheckBridge => return Err(ctx.err(e.id.span(), "check-bridge needs samples")),
        None => 0,
    };
    let mut inputs = Vec::new();
    for (k, v) in [("frame", &e.frame), ("topology", &e.topology), ("object", &e.object), ("props", &e.props)] {
        if let Some(v) = v {
            inputs.push(format!("{k}={}", v.get_ref()));
        }
    }
    if let Some(s) = &e.samples {
        inputs.push(format!("samples={}", s.get_ref()));
    }
    if let Some(s) = e.seed {
        inputs.push(format!("seed={s}"));
    }
    let need = |field: &Option<Spanned<String>>, what: &str| -> Result<Spanned<String>, WorkbenchError> {
        field
            .clone()
            .ok_or_else(|| ctx.err(e.op.span(), format!("{op} needs {what}")))
    };
    let target = resolve_target(ctx, e, op, bounds, &need)?;
    Ok(CheckSpec {
        id: e.id.get_ref().clone(),
        op,
        inputs: inputs.join(" "),
        bounds: bounds.get_ref().trim().to_string(),
        expect,
        target,
        samples,
        seed: e.seed.unwrap_or(0),
    })
}

fn tier_of(name: &str) -> Option<Tier> {
    match name.to_ascii_lowercase().as_str() {
        "m1" => Some(Tier::M1),
        "cps" => Some(Tier::Cps),
        _ => None,
    }
}

type Need<'a> = dyn Fn(&Option<Spanned<String>>, &str) -> Result<Spanned<String>, WorkbenchError> + 'a;

fn resolve_target(
    ctx: &Ctx,
    e: &CheckEntry,
    op: Op,
    bounds: &Spanned<String>,
    need: &Need,
) -> Result<Target, WorkbenchError> {
    let mca_bounds = || -> Result<Bounds, WorkbenchError> {
        let b: Bounds = bounds.get_ref().parse().map_err(|err| ctx.err(bounds.span(), format!("{err}")))?;
        guard_bounds(&b).map_err(|m| ctx.scale(bounds.span(), m))?;
        Ok(b)
    };
    let bounded = |tier: Tier, props: Option<Vec<Prop>>| -> Result<Target, WorkbenchError> {
        Ok(Target::Bounded {
            tier,
            bounds: mca_bounds()?,
            props,
        })
    };
    match op {
        Op::CheckMachine | Op::CheckLift => return bounded(Tier::Cps, None),
        Op::CheckBridge => return bounded(Tier::M1, None),
        Op::ValidateAlgebra => {
            let r = need(&e.frame, "a frame (algebra)")?;
            let alg = match builtin_algebra(r.get_ref()) {
                Ok(a) => a,
                Err(_) => HeytingAlgebra::from_file_text(&ctx.read(&r)?).map_err(|err| ctx.err(r.span(), err.to_string()))?,
            };
            if bounds.get_ref().trim() != "exhaustive" {
                return Err(ctx.err(bounds.span(), "validate-algebra takes bounds = \"exhaustive\""));
            }
            return Ok(Target::Algebra(alg));
        }
        _ => {}
    }
    let fr = need(&e.frame, "a frame")?;
    if let Some(tier) = tier_of(fr.get_ref()) {
        return match op {
            Op::ValidateFrame => bounded(tier, None),
            Op::ValidateTopology | Op::CheckDensity => {
                let t = need(&e.topology, "a topology")?;
                if t.get_ref() != "dnn" {
                    return Err(ctx.err(t.span(), "bounded tiers support the dnn topology only"));
                }
                bounded(tier, None)
            }
            Op::CheckDne => {
                let p = need(&e.props, "props (a file or \"regression\")")?;
                let props = if p.get_ref() == "regression" {
                    None
                } else {
                    let ps = parse_prop_file(&ctx.read(&p)?).map_err(|err| ctx.err(p.span(), err.to_string()))?;
                    if ps.is_empty() {
                        return Err(ctx.err(p.span(), "no propositions"));
                    }
                    Some(ps)
                };
                bounded(tier, props)
            }
            _ => Err(ctx.err(fr.span(), format!("{op} needs a finite frame"))),
        };
    }
    if op == Op::CheckDne {
        return Err(ctx.err(fr.span(), "check-dne runs on the m1 or cps tier"));
    }
    let frame = match builtin_algebra(fr.get_ref()) {
        Ok(a) => heyting_frame(&a).map_err(|err| ctx.err(fr.span(), err.to_string()))?,
        Err(_) => FiniteFrame::from_file_text(&ctx.read(&fr)?).map_err(|err| ctx.err(fr.span(), err.to_string()))?,
    };
    let needs_topology = matches!(
        op,
        Op::ValidateTopology | Op::CheckSeparated | Op::CheckSheaf | Op::OracleCompare | Op::CheckDensity
    );
    let topology = if needs_topology {
        let t = need(&e.topology, "a topology")?;
        let text = match t.get_ref().as_str() {
            "dnn" | "id" => t.get_ref().clone(),
            _ => ctx.read(&t)?,
        };
        Some(parse_topology(&frame, &text).map_err(|err| ctx.err(t.span(), err))?)
    } else {
        None
    };
    let needs_object = matches!(op, Op::ValidateObject | Op::CheckSeparated | Op::CheckSheaf);
    let object = if needs_object || (op == Op::OracleCompare && e.object.is_some()) {
        let o = need(&e.object, "an object")?;
        Some(parse_object(&frame, &ctx.read(&o)?).map_err(|err| ctx.err(o.span(), err.to_string()))?)
    } else {
        None
    };
    let fb = FiniteBounds::parse(op, bounds.get_ref()).map_err(|m| ctx.err(bounds.span(), m))?;
    fb.guard().map_err(|m| ctx.scale(bounds.span(), m))?;
    if let Some(o) = &object {
        if o.len() > MAX_CARRIER {
            return Err(ctx.scale(e.object.as_ref().map_or(0..0, |s| s.span()), "object carrier exceeds 3"));
        }
        if matches!(op, Op::CheckSheaf | Op::OracleCompare) && o.len() > fb.get("carrier") {
            return Err(ctx.err(bounds.span(), "the object's carrier exceeds the enumeration carrier"));
        }
    }
    Ok(Target::Finite {
        frame,
        topology,
        object,
        bounds: fb,
    })
}

/// A one-check suite from command-line style fields (`frame`, `topology`,
/// `object`, `props`, `bounds`, `samples`, `seed`); paths are relative to `dir`.
pub fn single_suite(op: &str, fields: &[(&str, String)], dir: &Path) -> Result<Suite, WorkbenchError> {
    let mut check = toml::Table::new();
    check.insert("id".into(), toml::Value::String(op.to_string()));
    check.insert("op".into(), toml::Value::String(op.to_string()));
    let mut cmd = format!("evframe {op}");
    for (k, v) in fields {
        let value = match *k {
            "samples" | "seed" => toml::Value::Integer(
                v.parse()
                    .map_err(|_| WorkbenchError::Io(format!("--{k} expects a number, found {v:?}")))?,
            ),
            _ => toml::Value::String(v.clone()),
        };
        check.insert(k.to_string(), value);
        cmd.push_str(&format!(" --{k} {}", shell_word(v)));
    }
    let mut root = toml::Table::new();
    root.insert("name".into(), toml::Value::String(op.to_string()));
    root.insert("check".into(), toml::Value::Array(vec![toml::Value::Table(check)]));
    let text = toml::to_string(&root).map_err(|e| WorkbenchError::Io(e.to_string()))?;
    let mut s = parse_suite(&text, "<command line>", dir)?;
    s.replay = Some(cmd);
    Ok(s)
}

fn shell_word(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "-_./=,:".contains(c)) {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', "'\\''"))
    }
}

/// The builtin suites: `finite-oracle` runs the oracle comparison on every
/// builtin frame under `id` and `dnn`.
pub fn builtin_suite(name: &str) -> Option<Suite> {
    if name != "finite-oracle" {
        return None;
    }
    let mut text = String::from("name = \"finite-oracle\"\n");
    for frame in ["BOOL2", "CHAIN3", "DIAMOND4"] {
        for t in ["id", "dnn"] {
            text.push_str(&format!(
                "\n[[check]]\nid = \"oracle-{}-{t}\"\nop = \"oracle-compare\"\nframe = \"{frame}\"\ntopology = \"{t}\"\nbounds = \"carrier=3 leq_carrier=2\"\nexpect = \"verified\"\n",
                frame.to_ascii_lowercase()
            ));
        }
    }
    let mut s = parse_suite(&text, "builtin:finite-oracle", Path::new(".")).expect("builtin suite parses");
    s.source = "builtin:finite-oracle".into();
    Some(s)
}

fn require_valid(eft: &Eft, o: &EftObject) -> Option<CheckResult> {
    match eft.validate_object(o) {
        CheckResult::Verified(_) => None,
        r => Some(CheckResult::Counterexample(
            Witness::new(format!("not an object: {}", r.witness().label)).with_lines(r.witness().lines.clone()),
        )),
    }
}

/// Runs one resolved check.
pub fn execute(spec: &CheckSpec) -> CheckResult {
    match &spec.target {
        Target::Algebra(a) => validate_algebra(a),
        Target::Finite {
            frame,
            topology,
            object,
            bounds,
        } => execute_finite(spec.op, frame, topology.as_ref(), object.as_ref(), bounds),
        Target::Bounded { tier, bounds, props } => execute_bounded(spec, *tier, bounds, props.as_deref()),
    }
}

fn execute_finite(
    op: Op,
    f: &FiniteFrame,
    t: Option<&Topology>,
    o: Option<&EftObject>,
    b: &FiniteBounds,
) -> CheckResult {
    let eft = Eft::new(f);
    let topo = || t.expect("resolved topology");
    let obj = || o.expect("resolved object");
    match op {
        Op::ValidateFrame => validate_frame(f, &f.full_sample()),
        Op::ValidateObject => eft.validate_object(obj()),
        Op::ValidateTopology => validate_topology(f, topo()),
        Op::CheckSeparated => require_valid(&eft, obj()).unwrap_or_else(|| check_separated(f, topo(), obj())),
        Op::CheckSheaf => {
            if let Some(r) = require_valid(&eft, obj()) {
                return r;
            }
            let mut u = Universe::new(&eft, b.get("carrier"));
            let a = u.index_of(obj()).expect("valid objects are enumerated");
            let family = sheaf_family(&mut u, topo(), a);
            check_sheaf(&eft, topo(), obj(), &family)
        }
        Op::OracleCompare => match o {
            None => check_oracle_equivalence(f, topo(), b.get("carrier"), b.get("leq_carrier")).0,
            Some(o) => {
                if let Some(r) = require_valid(&eft, o) {
                    return r;
                }
                let mut u = Universe::new(&eft, b.get("carrier"));
                let a = u.index_of(o).expect("valid objects are enumerated");
                let oracle = sheaf_oracle(&mut u, topo(), a);
                let s = check_separated(f, topo(), o);
                let sheaf = s.is_verified() && {
                    let family = sheaf_family(&mut u, topo(), a);
                    check_sheaf(&eft, topo(), o, &family).is_verified()
                };
                let w = Witness::new(format!(
                    "{}: sep {}, sheaf {sheaf}; oracle injective {}, bijective {}",
                    eft.describe(o),
                    s.is_verified(),
                    oracle.injective,
                    oracle.bijective
                ))
                .with_lines(oracle.witness.lines);
                if s.is_verified() == oracle.injective && sheaf == oracle.bijective {
                    CheckResult::Verified(w)
                } else {
                    CheckResult::Counterexample(w)
                }
            }
        },
        Op::CheckTopos => {
            let parts = check_topos(&eft, b.get("carrier"));
            let lines: Vec<String> = parts.iter().map(|(n, r)| format!("{n}: {}", r.witness().label)).collect();
            match CheckResult::all(format!("topos laws on {} up to carrier {}", f.name(), b.get("carrier")), parts.into_iter().map(|(_, r)| r)) {
                CheckResult::Verified(w) => CheckResult::Verified(w.with_lines(lines)),
                r => r,
            }
        }
        Op::CheckDensity => check_density_lemmas(f, topo(), b.get("carrier")),
        Op::CheckTripos => CheckResult::all(
            format!("tripos laws on {}", f.name()),
            [
                check_adjunctions(f, b.get("maps")),
                check_beck_chevalley(f, b.get("squares")),
                check_generic_element(f, b.get("maps")),
            ],
        ),
        _ => CheckResult::counterexample(format!("{op} does not run on finite frames")),
    }
}

fn execute_bounded(spec: &CheckSpec, tier: Tier, b: &Bounds, props: Option<&[Prop]>) -> CheckResult {
    match spec.op {
        Op::CheckMachine => return check_machine_equations(b, b.max_leaves),
        Op::CheckLift => {
            let m1 = MonadicCore::new(Tier::M1, b.clone());
            let cps = MonadicCore::new(Tier::Cps, b.clone());
            return check_lift_rate(&m1, &cps, &m1.default_sample());
        }
        _ => {}
    }
    let core = MonadicCore::new(tier, b.clone());
    let j = |p: &Prop| Prop::dnn(p);
    match spec.op {
        Op::ValidateFrame => validate_frame(&core, &core.default_sample()),
        Op::ValidateTopology => {
            let props: Vec<Prop> = core
                .default_sample()
                .props
                .into_iter()
                .filter(|p| *p != Prop::equals(S))
                .collect();
            let cands = core.candidate_evidences();
            CheckResult::all(
                format!("dnn on the {tier} tier"),
                [
                    validate_topology_bounded(&core, &j, &props, &cands),
                    check_j_distribution_bounded(&core, &j, &core.default_sample().props, &cands),
                ],
            )
        }
        Op::CheckDensity => {
            check_density_bounded(&core, &j, &core.default_sample().props, &core.candidate_evidences())
        }
        Op::CheckDne => {
            let owned;
            let props = match props {
                Some(p) => p,
                None => {
                    owned = dne_regression(&core);
                    &owned
                }
            };
            let results: Vec<CheckResult> = props.iter().map(|p| check_dne(&core, p)).collect();
            let verified = results.iter().filter(|r| r.is_verified()).count();
            let label = format!("double-negation elimination on {verified} of {} propositions", props.len());
            let mut w = Witness::new(label.clone());
            for r in &results {
                w = w.with_line(format!("{}: {}", r.kind(), r.witness().label));
                w = w.with_lines(r.witness().lines.iter().map(|l| format!("  {l}")));
            }
            match CheckResult::all(label, results) {
                CheckResult::Verified(_) => CheckResult::Verified(w),
                CheckResult::Counterexample(_) => CheckResult::Counterexample(w),
                CheckResult::Inconclusive(_) => CheckResult::Inconclusive(w),
            }
        }
        Op::CheckBridge => check_bridge(&core, spec.samples, spec.seed),
        op => CheckResult::counterexample(format!("{op} does not run on the {tier} tier")),
    }
}

/// Whether a record meets its expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Inconclusive without an expectation.
    Flagged,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Flagged => "flagged",
        }
    }

    fn from_name(s: &str) -> Option<Status> {
        [Status::Pass, Status::Fail, Status::Flagged].into_iter().find(|k| k.name() == s)
    }

    fn judge(verdict: Kind, expect: Option<Kind>) -> Status {
        match (expect, verdict) {
            (Some(e), v) if e == v => Status::Pass,
            (Some(_), _) => Status::Fail,
            (None, Kind::Verified) => Status::Pass,
            (None, Kind::Counterexample) => Status::Fail,
            (None, Kind::Inconclusive) => Status::Flagged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub id: String,
    pub op: String,
    pub inputs: String,
    pub bounds: String,
    pub verdict: Kind,
    pub expect: Option<Kind>,
    pub status: Status,
    pub witness: Witness,
    pub replay: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub suite: String,
    pub source: String,
    pub records: Vec<Record>,
    /// Header data: start time and wall times, excluded from the body.
    pub started_unix: u64,
    pub walls: Vec<(String, Duration)>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Run only the check with this id.
    pub only: Option<String>,
}

/// Executes every check of the suite in a work pool and assembles the
/// report in suite order.
pub fn run_suite(suite: &Suite, opts: &RunOptions) -> Result<Report, WorkbenchError> {
    let selected: Vec<&CheckSpec> = match &opts.only {
        Some(id) => {
            let c = suite.checks.iter().find(|c| &c.id == id).ok_or_else(|| WorkbenchError::UnknownId(id.clone()))?;
            vec![c]
        }
        None => suite.checks.iter().collect(),
    };
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let outcomes: Vec<(CheckResult, Duration)> = selected
        .par_iter()
        .map(|c| {
            let t = Instant::now();
            let r = execute(c);
            (r, t.elapsed())
        })
        .collect();
    let mut records = Vec::new();
    let mut walls = Vec::new();
    for (c, (r, wall)) in selected.iter().zip(outcomes) {
        let verdict = Kind::of(&r);
        walls.push((c.id.clone(), wall));
        records.push(Record {
            id: c.id.clone(),
            op: c.op.name().to_string(),
            inputs: c.inputs.clone(),
            bounds: c.bounds.clone(),
            verdict,
            expect: c.expect,
            status: Status::judge(verdict, c.expect),
            witness: r.witness().clone(),
            replay: suite
                .replay
                .clone()
                .unwrap_or_else(|| format!("evframe run-suite --suite {} --only {}", suite.source, c.id)),
        });
    }
    Ok(Report {
        suite: suite.name.clone(),
        source: suite.source.clone(),
        records,
        started_unix,
        walls,
    })
}

impl Report {
    /// 0 all pass; 1 a failing non-inconclusive record; 2 failures are all
    /// inconclusive, or inconclusive records are flagged and `fail_on_inconclusive`.
    pub fn exit_code(&self, fail_on_inconclusive: bool) -> i32 {
        let failed: Vec<&Record> = self.records.iter().filter(|r| r.status == Status::Fail).collect();
        if failed.iter().any(|r| r.verdict != Kind::Inconclusive) {
            1
        } else if !failed.is_empty() || (fail_on_inconclusive && self.records.iter().any(|r| r.status == Status::Flagged)) {
            2
        } else {
            0
        }
    }

    pub fn header(&self) -> String {
        let mut out = String::from("# evframe report\n");
        out.push_str(&format!("# started_unix = {}\n", self.started_unix));
        let mut total = Duration::ZERO;
        for (id, d) in &self.walls {
            out.push_str(&format!("# wall_ms {id} = {}\n", d.as_millis()));
            total += *d;
        }
        out.push_str(&format!("# total_wall_ms = {}\n", total.as_millis()));
        out
    }

    /// The deterministic part: identical for identical inputs and bounds.
    pub fn body(&self) -> String {
        let mut out = format!("suite = {}\nsource = {}\nchecks = {}\n", self.suite, self.source, self.records.len());
        for r in &self.records {
            out.push_str(&format!("\n[check {}]\n", r.id));
            out.push_str(&format!("op = {}\n", r.op));
            out.push_str(&format!("inputs = {}\n", r.inputs));
            out.push_str(&format!("bounds = {}\n", r.bounds));
            out.push_str(&format!("verdict = {}\n", r.verdict.name()));
            out.push_str(&format!("expect = {}\n", r.expect.map_or("none", Kind::name)));
            out.push_str(&format!("status = {}\n", r.status.name()));
            out.push_str(&format!("witness = {}\n", one_line(&r.witness.label)));
            for l in &r.witness.lines {
                for part in l.split('\n') {
                    out.push_str(&format!("  | {part}\n"));
                }
            }
            out.push_str(&format!("replay = {}\n", r.replay));
        }
        let count = |s: Status| self.records.iter().filter(|r| r.status == s).count();
        out.push_str(&format!(
            "\nsummary = {} pass, {} fail, {} flagged\n",
            count(Status::Pass),
            count(Status::Fail),
            count(Status::Flagged)
        ));
        out
    }

    pub fn render(&self) -> String {
        format!("{}{}", self.header(), self.body())
    }

    /// Reads a rendered report back; header lines are ignored except the wall times.
    pub fn parse(text: &str) -> Result<Report, WorkbenchError> {
        let bad = |n: usize, msg: &str| WorkbenchError::Report(format!("line {}: {msg}", n + 1));
        let mut rep = Report {
            suite: String::new(),
            source: String::new(),
            records: Vec::new(),
            started_unix: 0,
            walls: Vec::new(),
        };
        let mut cur: Option<Record> = None;
        for (n, line) in text.lines().enumerate() {
            if let Some(h) = line.strip_prefix("# ") {
                if let Some((k, v)) = h.split_once(" = ") {
                    if k == "started_unix" {
                        rep.started_unix = v.parse().map_err(|_| bad(n, "bad timestamp"))?;
                    } else if let Some(id) = k.strip_prefix("wall_ms ") {
                        let ms: u64 = v.parse().map_err(|_| bad(n, "bad wall time"))?;
                        rep.walls.push((id.to_string(), Duration::from_millis(ms)));
                    }
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("[check ") {
                if let Some(r) = cur.take() {
                    rep.records.push(r);
                }
                let id = rest.strip_suffix(']').ok_or_else(|| bad(n, "unterminated check header"))?;
                cur = Some(Record {
                    id: id.to_string(),
                    op: String::new(),
                    inputs: String::new(),
                    bounds: String::new(),
                    verdict: Kind::Inconclusive,
                    expect: None,
                    status: Status::Flagged,
                    witness: Witness::new(""),
                    replay: String::new(),
                });
                continue;
            }
            if let Some(l) = line.strip_prefix("  | ") {
                let r = cur.as_mut().ok_or_else(|| bad(n, "witness line outside a record"))?;
                r.witness.lines.push(l.to_string());
                continue;
            }
            let (k, v) = line.split_once(" = ").ok_or_else(|| bad(n, "expected key = value"))?;
            match (&mut cur, k) {
                (None, "suite") => rep.suite = v.to_string(),
                (None, "source") => rep.source = v.to_string(),
                (None, "checks") | (_, "summary") => {}
                (Some(r), "op") => r.op = v.to_string(),
                (Some(r), "inputs") => r.inputs = v.to_string(),
                (Some(r), "bounds") => r.bounds = v.to_string(),
                (Some(r), "verdict") => r.verdict = Kind::from_name(v).ok_or_else(|| bad(n, "unknown verdict"))?,
                (Some(r), "expect") => r.expect = if v == "none" { None } else { Kind::from_name(v) },
                (Some(r), "status") => r.status = Status::from_name(v).ok_or_else(|| bad(n, "unknown status"))?,
                (Some(r), "witness") => r.witness.label = v.to_string(),
                (Some(r), "replay") => r.replay = v.to_string(),
                _ => return Err(bad(n, &format!("unexpected key {k:?}"))),
            }
        }
        if let Some(r) = cur.take() {
            rep.records.push(r);
        }
        Ok(rep)
    }
}

fn one_line(s: &str) -> String {
    s.replace('\n', " ")
}

/// The full witness of one record, with what it was checked against.
pub fn explain(report: &Report, id: &str) -> Result<String, WorkbenchError> {
    let r = report
        .records
        .iter()
        .find(|r| r.id == id)
        .ok_or_else(|| WorkbenchError::UnknownId(id.to_string()))?;
    let mut out = format!("check {} ({})\n", r.id, r.op);
    out.push_str(&format!("inputs: {}\n", r.inputs));
    out.push_str(&format!("bounds: {}\n", r.bounds));
    let expected = r.expect.map_or(String::new(), |e| format!(", expected {}", e.name()));
    out.push_str(&format!("verdict: {}{expected} ({})\n", r.verdict.name(), r.status.name()));
    out.push_str(&format!("{}\n", r.witness.label));
    for l in &r.witness.lines {
        out.push_str(&format!("  {l}\n"));
    }
    out.push_str(&format!("replay: {}\n", r.replay));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn suite(text: &str) -> Result<Suite, WorkbenchError> {
        parse_suite(text, "t.toml", Path::new("."))
    }

    const BROKEN: &str = r#"
name = "broken"

[[check]]
id = "alg"
op = "validate-algebra"
frame = "CHAIN3"
bounds = "exhaustive"

[[check]]
id = "sep"
op = "validate-frame"
frame = "BOOL2"
bounds = "exhaustive"
expect = "verified"
"#;

    #[test]
    fn parse_and_run() {
        let s = suite(BROKEN).unwrap();
        assert_eq!(s.checks.len(), 2);
        let r = run_suite(&s, &RunOptions::default()).unwrap();
        assert_eq!(r.exit_code(false), 0, "{}", r.render());
        assert!(r.records.iter().all(|x| x.status == Status::Pass));
        let only = run_suite(&s, &RunOptions { only: Some("sep".into()) }).unwrap();
        assert_eq!(only.records.len(), 1);
        assert!(matches!(
            run_suite(&s, &RunOptions { only: Some("nope".into()) }),
            Err(WorkbenchError::UnknownId(_))
        ));
    }

    #[test]
    fn errors_carry_positions() {
        let e = suite("name = \"x\"\n[[check]]\nid = \"a\"\nop = \"frobnicate\"\nbounds = \"exhaustive\"\n").unwrap_err();
        assert!(matches!(e, WorkbenchError::Parse { line: 4, col: 6, .. }), "{e}");
        let e = suite("name = \"x\"\n[[check]]\nid = \"a\"\nop = \"validate-frame\"\nframe = \"BOOL2\"\n").unwrap_err();
        assert!(e.to_string().contains("no bounds"), "{e}");
        let e = suite("name = \"x\"\n[[check]]\nid = \"a\"\nop = \"check-topos\"\nframe = \"BOOL2\"\nbounds = \"carrier=4\"\n")
            .unwrap_err();
        assert!(matches!(e, WorkbenchError::Scale { line: 6, .. }), "{e}");
        let e = suite("name = \"x\"\n[[check]]\nid = \"a\"\nop = \"check-sheaf\"\nframe = \"BOOL2\"\ntopology = \"dnn\"\nobject = \"missing.toml\"\nbounds = \"carrier=2\"\n")
            .unwrap_err();
        assert!(e.to_string().contains("cannot read"), "{e}");
        let e = suite("name = \"x\"\n[[check]]\nid = \"a\"\nop = \"check-machine\"\nbounds = \"leaves=3\"\n").unwrap_err();
        assert!(e.to_string().contains("missing key"), "{e}");
        let e = suite("name = \"x\"\nbogus = 1\n").unwrap_err();
        assert!(matches!(e, WorkbenchError::Parse { line: 2, .. }), "{e}");
    }

    #[test]
    fn statuses_and_exit_codes() {
        use Kind::*;
        assert_eq!(Status::judge(Verified, None), Status::Pass);
        assert_eq!(Status::judge(Counterexample, None), Status::Fail);
        assert_eq!(Status::judge(Inconclusive, None), Status::Flagged);
        assert_eq!(Status::judge(Counterexample, Some(Counterexample)), Status::Pass);
        assert_eq!(Status::judge(Inconclusive, Some(Verified)), Status::Fail);
        let rec = |verdict, status| Record {
            id: "x".into(),
            op: "validate-frame".into(),
            inputs: String::new(),
            bounds: "exhaustive".into(),
            verdict,
            expect: None,
            status,
            witness: Witness::new("w"),
            replay: String::new(),
        };
        let rep = |recs: Vec<Record>| Report {
            suite: "s".into(),
            source: "s.toml".into(),
            records: recs,
            started_unix: 0,
            walls: Vec::new(),
        };
        assert_eq!(rep(vec![rec(Verified, Status::Pass)]).exit_code(true), 0);
        assert_eq!(rep(vec![rec(Counterexample, Status::Fail), rec(Inconclusive, Status::Fail)]).exit_code(false), 1);
        assert_eq!(rep(vec![rec(Inconclusive, Status::Fail)]).exit_code(false), 2);
        assert_eq!(rep(vec![rec(Inconclusive, Status::Flagged)]).exit_code(false), 0);
        assert_eq!(rep(vec![rec(Inconclusive, Status::Flagged)]).exit_code(true), 2);
    }

    #[test]
    fn report_round_trip_and_explain() {
        let s = suite(BROKEN).unwrap();
        let r = run_suite(&s, &RunOptions::default()).unwrap();
        let text = r.render();
        assert!(text.starts_with("# evframe report\n# started_unix = "));
        let back = Report::parse(&text).unwrap();
        assert_eq!(back.body(), r.body());
        let e = explain(&back, "sep").unwrap();
        assert!(e.contains("constructs: id = *"), "{e}");
        assert!(e.contains("replay: evframe run-suite --suite t.toml --only sep"), "{e}");
        assert!(explain(&back, "zzz").is_err());
    }

    #[test]
    fn builtin_suite_resolves() {
        let s = builtin_suite("finite-oracle").unwrap();
        assert_eq!(s.checks.len(), 6);
        assert!(s.checks.iter().all(|c| c.op == Op::OracleCompare && c.expect == Some(Kind::Verified)));
        assert!(builtin_suite("other").is_none());
    }

    #[test]
    fn single_checks() {
        let s = single_suite(
            "validate-topology",
            &[("frame", "CHAIN3".into()), ("topology", "dnn".into()), ("bounds", "exhaustive".into())],
            Path::new("."),
        )
        .unwrap();
        let r = run_suite(&s, &RunOptions::default()).unwrap();
        assert_eq!(r.records[0].verdict, Kind::Verified);
        assert_eq!(r.records[0].replay, "evframe validate-topology --frame CHAIN3 --topology dnn --bounds exhaustive");
        let s = single_suite("check-topos", &[("frame", "BOOL2".into()), ("bounds", "carrier=1".into())], Path::new(".")).unwrap();
        assert_eq!(s.checks[0].bounds, "carrier=1");
        assert!(single_suite("check-bridge", &[("samples", "x".into())], Path::new(".")).is_err());
        assert_eq!(shell_word("carrier=3 leq_carrier=2"), "'carrier=3 leq_carrier=2'");
    }

    #[test]
    fn bounds_strings() {
        assert!(FiniteBounds::parse(Op::ValidateFrame, "exhaustive").is_ok());
        assert!(FiniteBounds::parse(Op::ValidateFrame, "carrier=2").is_err());
        let b = FiniteBounds::parse(Op::OracleCompare, "carrier=3 leq_carrier=2").unwrap();
        assert_eq!((b.get("carrier"), b.get("leq_carrier")), (3, 2));
        assert!(FiniteBounds::parse(Op::OracleCompare, "carrier=3").is_err());
        assert!(FiniteBounds::parse(Op::CheckTopos, "carrier=2 x=1").is_err());
    }
}
