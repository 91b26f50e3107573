use std::path::PathBuf;
use std::process::{Command, Output};

fn repo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn evframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evframe"))
        .args(args)
        .current_dir(repo())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn body(report: &str) -> String {
    report.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

/// Splits a replay line, honouring single quotes.
fn words(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut any = false;
    for c in line.chars() {
        match c {
            '\'' => {
                quoted = !quoted;
                any = true;
            }
            ' ' if !quoted => {
                if any {
                    out.push(std::mem::take(&mut cur));
                    any = false;
                }
            }
            _ => {
                cur.push(c);
                any = true;
            }
        }
    }
    if any {
        out.push(cur);
    }
    out
}

#[test]
fn demo_suite_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.report");
    let b = dir.path().join("b.report");
    let o = evframe(&["run-suite", "--suite", "suites/demo.toml", "--report-out", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("sep-fuzzy: counterexample (pass)"));
    let o = evframe(&["run-suite", "--suite", "suites/demo.toml", "--report-out", b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    assert!(ta.starts_with("# evframe report"));
    assert_eq!(body(&ta), body(&tb));
    assert!(ta.contains("# wall_ms sheaf-discrete = "));
}

#[test]
fn broken_topology_exits_one_and_replays() {
    let o = evframe(&["run-suite", "--suite", "suites/broken.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("witness = inc = 0 is not evidenceable"), "{out}");
    let replay = out.lines().find_map(|l| l.strip_prefix("replay = ")).unwrap();
    let w = words(replay);
    assert_eq!(w[0], "evframe");
    let args: Vec<&str> = w[1..].iter().map(String::as_str).collect();
    let again = evframe(&args);
    assert_eq!(again.status.code(), Some(1));
    assert!(stdout(&again).contains("verdict: counterexample"));
}

#[test]
fn inconclusive_is_configurable() {
    let o = evframe(&["run-suite", "--suite", "suites/starved.toml"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("status = flagged"));
    let o = evframe(&["run-suite", "--suite", "suites/starved.toml", "--fail-on-inconclusive"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explain_sep_failure() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("demo.report");
    let o = evframe(&["run-suite", "--suite", "suites/demo.toml", "--report-out", r.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = evframe(&["explain", "--report", r.to_str().unwrap(), "sep-fuzzy"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("(a, b) = (a, b): ex(a) = 1, ex(b) = 1, j(a∼b) = 1, a∼b = h"), "{out}");
    let o = evframe(&["explain", "--report", r.to_str().unwrap(), "frame-chain3"]);
    assert!(stdout(&o).contains("constructs: id = *"));
    let o = evframe(&["explain", "--report", r.to_str().unwrap(), "nope"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_and_parse_errors_exit_three() {
    assert_eq!(evframe(&[]).status.code(), Some(3));
    assert_eq!(evframe(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(evframe(&["validate-frame"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("bad.toml");
    std::fs::write(&s, "name = \"bad\"\n[[check]]\nid = \"x\"\nop = \"validate-frame\"\nframe = \"NOPE\"\nbounds = \"exhaustive\"\n")
        .unwrap();
    let o = evframe(&["run-suite", "--suite", s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.toml:5:9"), "{err}");
    let o = evframe(&["check-sheaf", "--frame", "CHAIN3", "--topology", "dnn", "--object", "suites/objects/discrete.toml", "--bounds", "carrier=9"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("scale guard"));
}

#[test]
fn single_commands() {
    let o = evframe(&["validate-frame", "--frame", "DIAMOND4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: verified"));
    let o = evframe(&["validate-object", "--frame", "CHAIN3", "--object", "suites/objects/fuzzy.toml"]);
    assert_eq!(o.status.code(), Some(0));
    let o = evframe(&["validate-topology", "--frame", "CHAIN3", "--topology", "suites/topologies/broken.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let o = evframe(&[
        "check-sheaf", "--frame", "CHAIN3", "--topology", "dnn", "--object", "suites/objects/fuzzy.toml", "--bounds", "carrier=2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = evframe(&["oracle-compare", "--frame", "BOOL2", "--topology", "dnn", "--bounds", "carrier=2 leq_carrier=1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = evframe(&[
        "check-dne",
        "--frame",
        "cps",
        "--bounds",
        "basis=S,K leaves=2 fuel=10000 pool_basis=S,K,Z0 pool=3 psi=3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("cc trace of"), "{out}");
    assert!(out.contains("replay: evframe check-dne --frame cps --props regression --bounds 'basis=S,K"), "{out}");
}

#[test]
fn builtin_finite_oracle_suite() {
    let o = evframe(&["run-suite", "--suite", "builtin:finite-oracle"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("status = pass").count(), 6, "{out}");
}
