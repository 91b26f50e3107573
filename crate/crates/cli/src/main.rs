use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evframe_core::workbench::{explain, load_suite, run_suite, single_suite, Report, RunOptions, WorkbenchError};

/// Checks evidenced frames, effectful toposes and their topologies at explicit bounds.
///
/// Exit codes: 0 pass, 1 counterexample, 2 inconclusive-only failures,
/// 3 usage or parse error.
#[derive(Parser)]
#[command(name = "evframe", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// `exhaustive`, finite keys such as `carrier=3 leq_carrier=2`, or tier
    /// bounds `basis=S,K leaves=4 fuel=10000 pool_basis=S,K,Z0 pool=3 psi=3`.
    #[arg(long)]
    bounds: Option<String>,
    /// Write the full report (header and body) to this file.
    #[arg(long)]
    report_out: Option<String>,
    /// Exit 2 when a check is inconclusive.
    #[arg(long)]
    fail_on_inconclusive: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Conformance rows on a builtin algebra, a frame file, or the m1 / cps tier.
    ValidateFrame {
        #[arg(long)]
        frame: String,
        #[command(flatten)]
        common: Common,
    },
    /// Symmetry and transitivity of an object's equality predicate.
    ValidateObject {
        #[arg(long)]
        frame: String,
        #[arg(long)]
        object: String,
        #[command(flatten)]
        common: Common,
    },
    /// inc, idm and prs for a topology (`id`, `dnn` or a table file).
    ValidateTopology {
        #[arg(long)]
        frame: String,
        #[arg(long)]
        topology: String,
        #[command(flatten)]
        common: Common,
    },
    /// sep and dsc of an object against dense monos up to `carrier`.
    CheckSheaf {
        #[arg(long)]
        frame: String,
        #[arg(long)]
        topology: String,
        #[arg(long)]
        object: String,
        #[command(flatten)]
        common: Common,
    },
    /// The internal sheaf conditions against the enumeration oracle.
    OracleCompare {
        #[arg(long)]
        frame: String,
        #[arg(long)]
        topology: String,
        /// Compare one object instead of every enumerated object.
        #[arg(long)]
        object: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Double-negation elimination with `λz.CC`.
    CheckDne {
        #[arg(long, default_value = "cps")]
        frame: String,
        /// A proposition file, or `regression` for the builtin table set.
        #[arg(long, default_value = "regression")]
        props: String,
        #[command(flatten)]
        common: Common,
    },
    /// Runs a suite file, or `builtin:finite-oracle`.
    RunSuite {
        #[arg(long)]
        suite: String,
        /// Run a single check of the suite.
        #[arg(long)]
        only: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Prints the full witness of one check from a report file.
    Explain {
        #[arg(long)]
        report: String,
        id: String,
    },
}

fn finish(report: &Report, common: &Common, full: bool) -> Result<ExitCode, WorkbenchError> {
    if let Some(path) = &common.report_out {
        std::fs::write(path, report.render()).map_err(|e| WorkbenchError::Io(format!("cannot write {path}: {e}")))?;
    }
    if full {
        for r in &report.records {
            print!("{}", explain(report, &r.id)?);
        }
    } else {
        for r in &report.records {
            println!("{}: {} ({}) {}", r.id, r.verdict.name(), r.status.name(), r.witness.label);
        }
    }
    let code = report.exit_code(common.fail_on_inconclusive);
    Ok(ExitCode::from(code as u8))
}

fn single(op: &str, fields: Vec<(&str, Option<String>)>, common: &Common) -> Result<ExitCode, WorkbenchError> {
    let mut given: Vec<(&str, String)> = fields.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
    given.push(("bounds", common.bounds.clone().unwrap_or_else(|| "exhaustive".into())));
    let suite = single_suite(op, &given, Path::new("."))?;
    let report = run_suite(&suite, &RunOptions::default())?;
    finish(&report, common, true)
}

fn run(cli: Cli) -> Result<ExitCode, WorkbenchError> {
    match cli.cmd {
        Cmd::ValidateFrame { frame, common } => single("validate-frame", vec![("frame", Some(frame))], &common),
        Cmd::ValidateObject { frame, object, common } => {
            single("validate-object", vec![("frame", Some(frame)), ("object", Some(object))], &common)
        }
        Cmd::ValidateTopology { frame, topology, common } => {
            single("validate-topology", vec![("frame", Some(frame)), ("topology", Some(topology))], &common)
        }
        Cmd::CheckSheaf {
            frame,
            topology,
            object,
            common,
        } => single(
            "check-sheaf",
            vec![("frame", Some(frame)), ("topology", Some(topology)), ("object", Some(object))],
            &common,
        ),
        Cmd::OracleCompare {
            frame,
            topology,
            object,
            common,
        } => single(
            "oracle-compare",
            vec![("frame", Some(frame)), ("topology", Some(topology)), ("object", object)],
            &common,
        ),
        Cmd::CheckDne { frame, props, common } => {
            single("check-dne", vec![("frame", Some(frame)), ("props", Some(props))], &common)
        }
        Cmd::RunSuite { suite, only, common } => {
            let suite = load_suite(&suite)?;
            let full = only.is_some();
            let report = run_suite(&suite, &RunOptions { only })?;
            if common.report_out.is_none() && !full {
                print!("{}", report.render());
                return Ok(ExitCode::from(report.exit_code(common.fail_on_inconclusive) as u8));
            }
            finish(&report, &common, full)
        }
        Cmd::Explain { report, id } => {
            let text = std::fs::read_to_string(&report).map_err(|e| WorkbenchError::Io(format!("cannot read {report}: {e}")))?;
            print!("{}", explain(&Report::parse(&text)?, &id)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
