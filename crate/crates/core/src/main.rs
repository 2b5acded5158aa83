use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rieszmix::cli::{self, RunOptions};
use rieszmix::error::{Error, Result};
use rieszmix::exponents::{parse_rational, Rational};

/// Decide and probe boundedness of multilinear fractional integrals on
/// mixed-norm Lebesgue spaces.
///
/// Exit codes: 0 bounded, 10 unbounded, 20 outside the characterization,
/// 2 input error, 3 computation error, 1 self-test failure.
#[derive(Parser)]
#[command(name = "rieszmix", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide boundedness and write the verdict with its condition trace.
    Decide(Common),
    /// Like decide, plus rank profile, pivot set and canonical form.
    Analyze(Common),
    /// Like decide, plus a numerical ratio probe.
    Probe(Common),
    /// Run the property suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Problem file (TOML).
    #[arg(long)]
    problem: PathBuf,
    /// Report destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cells per axis of the probe input grid.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Half-width of the probe input grid, as a rational.
    #[arg(long, value_parser = rat)]
    grid_l: Option<Rational>,
    #[arg(long)]
    seed: Option<u64>,
    /// Probe family: dilation, translation, logpower or boxE.
    #[arg(long)]
    family: Option<String>,
    /// Comma separated probe parameters.
    #[arg(long)]
    params: Option<String>,
}

fn rat(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn run_report(cmd: &str, c: Common) -> Result<i32> {
    let text = std::fs::read_to_string(&c.problem)
        .map_err(|e| Error::Input(format!("{}: {e}", c.problem.display())))?;
    let opts = RunOptions {
        grid_n: c.grid_n,
        grid_l: c.grid_l,
        seed: c.seed,
        family: c.family,
        params: c.params.as_deref().map(cli::parse_params).transpose()?,
    };
    let report = match cmd {
        "decide" => cli::decide_report(&text, &opts)?,
        "analyze" => cli::analyze_report(&text, &opts)?,
        _ => cli::probe_report(&text, &opts)?,
    };
    let body = cli::render(&report);
    match c.out {
        Some(path) => std::fs::write(&path, body).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match cli.command {
        Command::Selftest { seed } => {
            let r = cli::selftest_report(seed);
            print!("{}", cli::selftest_summary(&r));
            return ExitCode::from(if r.passed() { 0 } else { cli::EXIT_SELFTEST_FAILED as u8 });
        }
        Command::Decide(c) => ("decide", c),
        Command::Analyze(c) => ("analyze", c),
        Command::Probe(c) => ("probe", c),
    };
    match run_report(name, common) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("rieszmix {name}: {e}");
            ExitCode::from(cli::error_exit_code(&e) as u8)
        }
    }
}
