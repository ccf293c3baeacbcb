//! Command dispatch behind the `sigma-scope` binary: parse a definitions file, run
//! one command, and assemble a `sigma-scope/1` report with an exit code.
//!
//! Exit codes: 0 σ-I-small (cover), 10 I-positive (witness), 2 input error,
//! 3 internal soundness failure or failed re-verification.

pub mod format;
pub mod oracle;
pub mod report;

use std::fmt::Write as _;

use serde::Serialize;

use crate::dichotomy::derive::derive_sequence;
use crate::dichotomy::{classify, Method, Verdict};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::ideal::Ideal;
use crate::pairtree::PairTree;
use crate::point::EPPoint;
use crate::witness::positive::verify_witness_at;
use crate::witness::{build_cover, build_witness, leftmost_uniformize, verify_cover, Report};

pub use format::{parse_definitions, Definition, Definitions};
use report::{
    read_certificate, read_ideal, read_pairtree, verdict_doc, CommandEcho, ErrorDoc, ReportDoc,
    StoredCertificate, TraceDoc, VerdictDoc, POSITIVE, SCHEMA, SMALL_COVER,
};

pub const EXIT_SMALL: i32 = 0;
pub const EXIT_POSITIVE: i32 = 10;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOUNDNESS: i32 = 3;

/// The curated fixture suite shipped with the crate.
pub const FIXTURE_SUITE: &str = include_str!("../../fixtures/suite.sst");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Classify,
    Derive,
    Witness,
    Cover,
    Uniformize,
    Oracle,
    Verify,
}

impl CommandKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CommandKind::Classify => "classify",
            CommandKind::Derive => "derive",
            CommandKind::Witness => "witness",
            CommandKind::Cover => "cover",
            CommandKind::Uniformize => "uniformize",
            CommandKind::Oracle => "oracle",
            CommandKind::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Command {
    pub kind: CommandKind,
    pub name: Option<String>,
    pub all: bool,
    pub ideal: String,
    pub method: Method,
    pub depth: usize,
    pub letters: u64,
    pub nmax: u64,
    pub point: Option<String>,
    pub trace: bool,
    pub exec: Exec,
}

impl Command {
    pub fn new(kind: CommandKind) -> Self {
        Command {
            kind,
            name: None,
            all: false,
            ideal: format::FIN.into(),
            method: Method::Kernel,
            depth: 4,
            letters: 8,
            nmax: 8,
            point: None,
            trace: false,
            exec: Exec::default(),
        }
    }

    pub fn named(kind: CommandKind, name: &str) -> Self {
        Command {
            name: Some(name.into()),
            ..Command::new(kind)
        }
    }

    fn echo(&self) -> CommandEcho {
        CommandEcho {
            command: self.kind.as_str().into(),
            name: self.name.clone(),
            all: self.all,
            ideal: self.ideal.clone(),
            method: self.method,
            depth: self.depth,
            letters: self.letters,
            nmax: self.nmax,
            point: self.point.clone(),
            trace: self.trace,
        }
    }
}

/// Result of one command: the report, a plain-text summary, and the exit
/// code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: ReportDoc,
    pub text: String,
}

impl Outcome {
    /// Pretty JSON; byte-identical for identical inputs and flags.
    pub fn json(&self) -> String {
        serde_json::to_string_pretty(&self.report).expect("reports serialize")
    }
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::InternalSoundness(_) => EXIT_SOUNDNESS,
        _ => EXIT_INPUT,
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("documents serialize")
}

/// Runs `cmd`. `input` is the definitions file text, or the stored report JSON
/// for `verify`.
pub fn run(cmd: &Command, input: &str) -> Outcome {
    let result = match cmd.kind {
        CommandKind::Verify => run_verify(cmd, input),
        _ => parse_definitions(input).and_then(|defs| run_on_definitions(cmd, &defs)),
    };
    match result {
        Ok((exit_code, results, text)) => Outcome {
            exit_code,
            report: ReportDoc {
                schema: SCHEMA.into(),
                command: cmd.echo(),
                exit_code,
                results,
                error: None,
            },
            text,
        },
        Err(e) => {
            let exit_code = exit_for(&e);
            Outcome {
                exit_code,
                report: ReportDoc {
                    schema: SCHEMA.into(),
                    command: cmd.echo(),
                    exit_code,
                    results: Vec::new(),
                    error: Some(ErrorDoc::from(&e)),
                },
                text: format!("error: {e}\n"),
            }
        }
    }
}

type Produced = (i32, Vec<serde_json::Value>, String);

fn targets(cmd: &Command, defs: &Definitions) -> Result<Vec<String>> {
    if cmd.all {
        return Ok(defs.tree_names());
    }
    let name = cmd
        .name
        .clone()
        .ok_or_else(|| Error::Validation("--name or --all is required".into()))?;
    defs.pair_tree(&name)?;
    Ok(vec![name])
}

/// Runs `f` on every target (concurrently in batch mode) and keeps the
/// first error in target order.
fn per_target<T: Send>(
    cmd: &Command,
    defs: &Definitions,
    f: impl Fn(&str, &PairTree) -> Result<T> + Sync + Send,
) -> Result<Vec<(String, T)>> {
    let names = targets(cmd, defs)?;
    let trees: Vec<(String, PairTree)> = names
        .into_iter()
        .map(|n| {
            let s = defs.pair_tree(&n)?;
            Ok((n, s))
        })
        .collect::<Result<_>>()?;
    exec::map(cmd.exec, &trees, |(n, s)| f(n, s).map(|v| (n.clone(), v)))
        .into_iter()
        .collect()
}

fn verify_verdict(cmd: &Command, verdict: &Verdict, s: &PairTree, ideal: &Ideal) -> Report {
    match verdict {
        Verdict::Positive(w) => verify_witness_at(w, s, ideal, cmd.depth, cmd.letters),
        Verdict::SmallCover(scheme) => verify_cover(scheme, cmd.depth, cmd.letters, cmd.nmax),
    }
}

fn run_on_definitions(cmd: &Command, defs: &Definitions) -> Result<Produced> {
    let ideal = defs.ideal(&cmd.ideal)?;
    let mut text = String::new();
    match cmd.kind {
        CommandKind::Classify => {
            let docs = per_target(cmd, defs, |name, s| {
                let c = classify(s, &ideal, cmd.method)?;
                let verification = verify_verdict(cmd, &c.verdict, s, &ideal);
                if !verification.accepted() {
                    return Err(Error::InternalSoundness(verification.failures().join("; ")));
                }
                Ok(verdict_doc(name, &cmd.ideal, s, &c, verification, cmd.nmax, cmd.trace))
            })?;
            let mut exit = EXIT_SMALL;
            for (_, d) in &docs {
                if d.verdict == POSITIVE {
                    exit = EXIT_POSITIVE;
                }
                writeln!(
                    text,
                    "{}\t{}\t{}\t{}\t{} checks passed",
                    d.target,
                    d.ideal,
                    d.method,
                    d.verdict,
                    d.verification.checks.len()
                )
                .unwrap();
            }
            Ok((exit, docs.iter().map(|(_, d)| to_value(d)).collect(), text))
        }
        CommandKind::Witness | CommandKind::Cover => {
            let positive = cmd.kind == CommandKind::Witness;
            let docs = per_target(cmd, defs, |name, s| {
                let verdict = if positive {
                    Verdict::Positive(build_witness(s, &ideal, cmd.method)?)
                } else {
                    let trace = (cmd.method == Method::Derivative).then(|| derive_sequence(s));
                    Verdict::SmallCover(build_cover(s, &ideal, trace.as_ref())?)
                };
                let verification = verify_verdict(cmd, &verdict, s, &ideal);
                if !verification.accepted() {
                    return Err(Error::InternalSoundness(verification.failures().join("; ")));
                }
                let c = crate::dichotomy::Classification {
                    verdict,
                    ideal: ideal.clone(),
                    method: cmd.method,
                    diagnostics: Default::default(),
                    trace: None,
                };
                let mut doc = verdict_doc(name, &cmd.ideal, s, &c, verification, cmd.nmax, false);
                doc.diagnostics = None;
                Ok(doc)
            })?;
            for (_, d) in &docs {
                writeln!(text, "{}\t{}\t{}\tcertificate accepted", d.target, d.ideal, d.verdict).unwrap();
            }
            let exit = if positive { EXIT_POSITIVE } else { EXIT_SMALL };
            Ok((exit, docs.iter().map(|(_, d)| to_value(d)).collect(), text))
        }
        CommandKind::Derive => {
            #[derive(Serialize)]
            struct DeriveDoc {
                target: String,
                trace: TraceDoc,
            }
            let docs = per_target(cmd, defs, |name, s| {
                Ok(DeriveDoc {
                    target: name.into(),
                    trace: TraceDoc::new(&derive_sequence(s)),
                })
            })?;
            for (_, d) in &docs {
                let sizes: Vec<String> = d.trace.stages.iter().map(|s| s.len().to_string()).collect();
                writeln!(
                    text,
                    "{}\tlambda {}\tstages [{}]\t{} game calls",
                    d.target,
                    d.trace.lambda,
                    sizes.join(", "),
                    d.trace.games.len()
                )
                .unwrap();
            }
            Ok((EXIT_SMALL, docs.iter().map(|(_, d)| to_value(d)).collect(), text))
        }
        CommandKind::Uniformize => {
            #[derive(Serialize)]
            struct UniformDoc {
                target: String,
                point: EPPoint,
                y: EPPoint,
                warnings: Vec<String>,
                period_bound: u64,
            }
            let literal = cmd
                .point
                .as_deref()
                .ok_or_else(|| Error::Validation("--point is required".into()))?;
            let x: EPPoint = literal.parse()?;
            let docs = per_target(cmd, defs, |name, s| {
                let u = leftmost_uniformize(s, &x)?;
                Ok(UniformDoc {
                    target: name.into(),
                    point: x.clone(),
                    y: u.y,
                    warnings: u.warnings,
                    period_bound: u.period_bound,
                })
            })?;
            for (_, d) in &docs {
                writeln!(text, "{}\tx = {}\ty = {}", d.target, d.point, d.y).unwrap();
                for w in &d.warnings {
                    writeln!(text, "  warning: {w}").unwrap();
                }
            }
            Ok((EXIT_SMALL, docs.iter().map(|(_, d)| to_value(d)).collect(), text))
        }
        CommandKind::Oracle => {
            #[derive(Serialize)]
            struct OracleDoc {
                target: String,
                ideal: String,
                agrees: bool,
                checks: Report,
            }
            let docs = per_target(cmd, defs, |name, s| {
                let checks = oracle::oracle_checks(
                    s,
                    &ideal,
                    cmd.depth,
                    cmd.letters,
                    cmd.nmax,
                    Exec::Sequential,
                );
                Ok(OracleDoc {
                    target: name.into(),
                    ideal: cmd.ideal.clone(),
                    agrees: checks.accepted(),
                    checks,
                })
            })?;
            let mut exit = EXIT_SMALL;
            for (_, d) in &docs {
                if !d.agrees {
                    exit = EXIT_SOUNDNESS;
                }
                let status = if d.agrees { "agree" } else { "DISAGREE" };
                writeln!(text, "{}\t{}\toracle {status}", d.target, d.ideal).unwrap();
                for f in d.checks.failures() {
                    writeln!(text, "  {f}").unwrap();
                }
            }
            Ok((exit, docs.iter().map(|(_, d)| to_value(d)).collect(), text))
        }
        CommandKind::Verify => unreachable!("verify reads a report, not a definitions file"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
struct ReverifyDoc {
    target: String,
    ideal: String,
    method: Method,
    verdict: String,
    verdict_reproduced: bool,
    verification: Report,
}

fn reverify(doc: &VerdictDoc, echo: &CommandEcho) -> Result<ReverifyDoc> {
    let s = read_pairtree(&doc.source)?;
    let ideal = read_ideal(&doc.ideal_source)?;
    let verification = match read_certificate(&doc.certificate, &ideal)? {
        StoredCertificate::Witness(w) => verify_witness_at(&w, &s, &ideal, echo.depth, echo.letters),
        StoredCertificate::Cover(scheme) => verify_cover(&scheme, echo.depth, echo.letters, echo.nmax),
    };
    let fresh = match classify(&s, &ideal, doc.method) {
        Ok(c) if c.verdict.is_positive() => POSITIVE,
        Ok(_) => SMALL_COVER,
        Err(e) => return Err(e),
    };
    Ok(ReverifyDoc {
        target: doc.target.clone(),
        ideal: doc.ideal.clone(),
        method: doc.method,
        verdict: doc.verdict.clone(),
        verdict_reproduced: fresh == doc.verdict,
        verification,
    })
}

fn run_verify(_cmd: &Command, input: &str) -> Result<Produced> {
    let stored: ReportDoc = serde_json::from_str(input)
        .map_err(|e| Error::Validation(format!("not a sigma-scope report: {e}")))?;
    if stored.schema != SCHEMA {
        return Err(Error::Validation(format!("unsupported schema {}", stored.schema)));
    }
    let verdicts: Vec<VerdictDoc> = stored
        .results
        .iter()
        .filter_map(|v| serde_json::from_value(v.clone()).ok())
        .collect();
    if verdicts.is_empty() {
        return Err(Error::Validation("report carries no certificates".into()));
    }
    let mut text = String::new();
    let mut exit = EXIT_SMALL;
    let mut out = Vec::new();
    for doc in &verdicts {
        let r = reverify(doc, &stored.command)?;
        let ok = r.verification.accepted() && r.verdict_reproduced;
        if !ok {
            exit = EXIT_SOUNDNESS;
        } else if r.verdict == POSITIVE && exit != EXIT_SOUNDNESS {
            exit = EXIT_POSITIVE;
        }
        writeln!(
            text,
            "{}\t{}\t{}\t{}",
            r.target,
            r.ideal,
            r.verdict,
            if ok { "re-verified" } else { "REJECTED" }
        )
        .unwrap();
        out.push(to_value(&r));
    }
    Ok((exit, out, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn suite_run(kind: CommandKind, name: &str) -> Outcome {
        run(&Command::named(kind, name), FIXTURE_SUITE)
    }

    #[test]
    fn documented_cli_examples() {
        let o = suite_run(CommandKind::Classify, "DIAG");
        assert_eq!(o.exit_code, EXIT_POSITIVE);
        assert_eq!(o.report.results[0]["verdict"], POSITIVE);

        let mut cmd = Command::named(CommandKind::Classify, "COMB_PAIR");
        cmd.method = Method::Derivative;
        let o = run(&cmd, FIXTURE_SUITE);
        assert_eq!(o.exit_code, EXIT_SMALL);
        let trees = &o.report.results[0]["certificate"]["trees"];
        assert!(trees.as_array().unwrap().iter().all(|t| t["compact"] == true));

        let mut cmd = Command::named(CommandKind::Uniformize, "HALF");
        cmd.point = Some("2,(7)".into());
        let o = run(&cmd, FIXTURE_SUITE);
        assert_eq!(o.exit_code, 0);
        assert_eq!(o.report.results[0]["y"], "0,(7)");
    }

    #[test]
    fn input_errors_exit_2_without_certificates() {
        let mut cmd = Command::named(CommandKind::Classify, "EVPAIR");
        cmd.ideal = "evens".into();
        cmd.method = Method::Derivative;
        let o = run(&cmd, FIXTURE_SUITE);
        assert_eq!(o.exit_code, EXIT_INPUT);
        assert!(o.report.results.is_empty());
        assert_eq!(o.report.error.as_ref().unwrap().kind, "MethodMismatch");

        let o = suite_run(CommandKind::Classify, "NOPE");
        assert_eq!(o.exit_code, EXIT_INPUT);
        let o = run(&Command::named(CommandKind::Classify, "T"), "ntree T start");
        assert_eq!(o.report.error.unwrap().kind, "ParseError");
        let o = suite_run(CommandKind::Witness, "COMB");
        assert_eq!(o.report.error.unwrap().kind, "NotPositive");
        let o = suite_run(CommandKind::Cover, "FULL");
        assert_eq!(o.report.error.unwrap().kind, "NotSmall");
    }

    #[test]
    fn stored_reports_reverify() {
        let mut cmd = Command::new(CommandKind::Classify);
        cmd.all = true;
        let o = run(&cmd, FIXTURE_SUITE);
        let again = run(&Command::new(CommandKind::Verify), &o.json());
        assert_eq!(again.exit_code, o.exit_code, "{}", again.text);
        assert!(again.text.lines().all(|l| l.ends_with("re-verified")));
    }

    #[test]
    fn tampered_reports_are_rejected() {
        let o = suite_run(CommandKind::Classify, "DIAG");
        let json = o.json().replace("dtail 0 1 0 -> d", "dtail 0 2 0 -> d");
        let again = run(&Command::new(CommandKind::Verify), &json);
        assert_eq!(again.exit_code, EXIT_SOUNDNESS, "{}", again.text);
    }

    #[test]
    fn oracle_agrees_on_the_suite() {
        for ideal in ["fin", "evens"] {
            let mut cmd = Command::new(CommandKind::Oracle);
            cmd.all = true;
            cmd.ideal = ideal.into();
            let o = run(&cmd, FIXTURE_SUITE);
            assert_eq!(o.exit_code, 0, "{}", o.text);
        }
    }

    #[test]
    fn reports_are_byte_stable() {
        let mut cmd = Command::new(CommandKind::Classify);
        cmd.all = true;
        cmd.trace = true;
        cmd.method = Method::Derivative;
        let a = run(&cmd, FIXTURE_SUITE).json();
        cmd.exec = Exec::Sequential;
        let b = run(&cmd, FIXTURE_SUITE).json();
        assert_eq!(a, b);
    }
}
