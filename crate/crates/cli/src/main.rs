use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use sigma_scope::cli::{run, Command, CommandKind, EXIT_INPUT, FIXTURE_SUITE};
use sigma_scope::exec::Exec;
use sigma_scope::Method;

#[derive(Parser)]
#[command(
    name = "sigma-scope",
    version,
    about = "Decide σ-I-smallness versus I-positivity for projections of regular closed sets, with certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Definitions file (for `verify`: a stored JSON report). Defaults to the
    /// bundled fixture suite.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Name of the ntree or pairtree to run on.
    #[arg(long, global = true)]
    name: Option<String>,

    /// Run on every tree in the input.
    #[arg(long, global = true)]
    all: bool,

    /// `fin` or the name of an ideal block.
    #[arg(long, global = true, default_value = "fin")]
    ideal: String,

    #[arg(long, global = true, value_enum, default_value_t = MethodArg::Kernel)]
    method: MethodArg,

    /// Snapshot depth for verification.
    #[arg(long, global = true, default_value_t = 4)]
    depth: usize,

    /// Snapshot letter bound for verification.
    #[arg(long, global = true, default_value_t = 8)]
    letters: u64,

    /// Largest cover index checked.
    #[arg(long, global = true, default_value_t = 8)]
    nmax: u64,

    /// Eventually periodic point, e.g. "2,(7)".
    #[arg(long, global = true)]
    point: Option<String>,

    /// Include the derivative trace in classify reports.
    #[arg(long, global = true)]
    trace: bool,

    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    json: bool,

    /// Disable data-parallel batch evaluation.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Decide the dichotomy and certify the verdict.
    Classify,
    /// Print the derivative sequence.
    Derive,
    /// Build and verify an I-positive witness.
    Witness,
    /// Build and verify a σ-I-small cover scheme.
    Cover,
    /// Leftmost y with (x, y) a branch, for x given by --point.
    Uniformize,
    /// Cross-check the engine against brute-force enumeration.
    Oracle,
    /// Re-verify a stored report.
    Verify,
}

#[derive(ValueEnum, Clone, Copy)]
enum MethodArg {
    Kernel,
    Derivative,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let kind = match cli.command {
        Cmd::Classify => CommandKind::Classify,
        Cmd::Derive => CommandKind::Derive,
        Cmd::Witness => CommandKind::Witness,
        Cmd::Cover => CommandKind::Cover,
        Cmd::Uniformize => CommandKind::Uniformize,
        Cmd::Oracle => CommandKind::Oracle,
        Cmd::Verify => CommandKind::Verify,
    };
    let input = match &cli.input {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT as u8);
            }
        },
        None if kind == CommandKind::Verify => {
            eprintln!("error: verify needs --input REPORT.json");
            return ExitCode::from(EXIT_INPUT as u8);
        }
        None => FIXTURE_SUITE.to_string(),
    };
    let mut cmd = Command::new(kind);
    cmd.name = cli.name;
    cmd.all = cli.all;
    cmd.ideal = cli.ideal;
    cmd.method = match cli.method {
        MethodArg::Kernel => Method::Kernel,
        MethodArg::Derivative => Method::Derivative,
    };
    cmd.depth = cli.depth;
    cmd.letters = cli.letters;
    cmd.nmax = cli.nmax;
    cmd.point = cli.point;
    cmd.trace = cli.trace;
    cmd.exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };

    let started = Instant::now();
    let outcome = run(&cmd, &input);
    let mut out = std::io::stdout().lock();
    // a closed pipe (e.g. `| head`) is not an error worth a panic
    let _ = if cli.json {
        writeln!(out, "{}", outcome.json())
    } else {
        write!(out, "{}", outcome.text)
    };
    if !cli.json {
        // timing stays out of the JSON report so reports are byte-stable
        eprintln!("elapsed: {:.1} ms", started.elapsed().as_secs_f64() * 1e3);
    }
    ExitCode::from(outcome.exit_code as u8)
}
