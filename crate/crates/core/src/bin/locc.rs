use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use locc::analysis::{analyze, generate, simulate_certificate, AnalysisOptions, Family};
use locc::certs::{Certificate, StateSet};
use locc::search::{search_certificate, SearchConfig, SearchStatus};
use locc::simproto::{simulate, Protocol};
use locc::{Error, Result, Tolerance};

#[derive(Parser)]
#[command(name = "locc", version, about = "One-way LOCC distinguishability of maximally entangled states")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Absolute tolerance for zero tests.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Also write the JSON output to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in family as a state set.
    Gen {
        /// paulis-x, paulis-z, paulis-all, permutations-cyclic, random-unitary or random-orthogonal-pair.
        family: Family,
        #[arg(long)]
        d: usize,
        /// Number of states (random-unitary only).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run the full analysis on a state set.
    Analyze {
        file: PathBuf,
        /// Fall back to numerical search.
        #[arg(long)]
        search: bool,
    },
    /// Look for a certificate, structured constructions first.
    Search {
        file: PathBuf,
        /// Fixed number of columns.
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
        /// Largest objective value accepted as a solution.
        #[arg(long, default_value_t = 1e-8)]
        accept_residual: f64,
    },
    /// Sample the protocol built from a certificate (or a stored protocol).
    Simulate {
        file: PathBuf,
        #[arg(long, conflicts_with = "protocol", required_unless_present = "protocol")]
        certificate: Option<PathBuf>,
        #[arg(long)]
        protocol: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

/// Accepts a bare certificate or any report with a `certificate` field.
fn read_certificate(path: &Path) -> Result<Certificate> {
    let value: serde_json::Value = read_json(path)?;
    let inner = value.get("certificate").cloned().unwrap_or(value);
    if inner.is_null() {
        return Err(Error::InvalidArgument(format!("{} holds no certificate", path.display())));
    }
    Ok(serde_json::from_value(inner)?)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    if let Some(path) = out {
        fs::write(path, &text)?;
    }
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn run(cli: Cli) -> Result<i32> {
    let tol = match cli.tol {
        Some(t) => Tolerance::default().with_zero_abs(t),
        None => Tolerance::default(),
    };
    let out = cli.json_out.as_deref();
    match cli.command {
        Command::Gen { family, d, n } => {
            emit(&generate(family, d, n, cli.seed)?, out)?;
            Ok(0)
        }
        Command::Analyze { file, search } => {
            let set: StateSet = read_json(&file)?;
            let opts = AnalysisOptions { seed: cli.seed, tol, search: search.then(SearchConfig::default) };
            let report = analyze(&set, &opts)?;
            emit(&report, out)?;
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            Ok(report.exit_code())
        }
        Command::Search { file, r, restarts, max_iters, accept_residual } => {
            let set: StateSet = read_json(&file)?;
            let cfg = SearchConfig {
                r,
                restarts,
                max_iters,
                accept_residual,
                seed: cli.seed,
                tol,
                ..SearchConfig::default()
            };
            let result = search_certificate(&set, &cfg)?;
            emit(&result, out)?;
            if result.status == SearchStatus::Found {
                Ok(0)
            } else {
                eprintln!(
                    "no certificate found; best objective {:e} over r = {:?}",
                    result.best_objective, result.r_tried
                );
                Ok(1)
            }
        }
        Command::Simulate { file, certificate, protocol, trials } => {
            let set: StateSet = read_json(&file)?;
            let report = match (certificate, protocol) {
                (Some(path), _) => simulate_certificate(&set, &read_certificate(&path)?, trials, cli.seed, &tol)?,
                (None, Some(path)) => {
                    let p: Protocol = read_json(&path)?;
                    let p = Protocol::new(p.alice, p.bob)?;
                    simulate(&set, &p, trials, cli.seed)?
                }
                (None, None) => unreachable!("clap requires one of the two"),
            };
            emit(&report, out)?;
            Ok(if report.exact_success >= 1.0 - 1e-8 { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
