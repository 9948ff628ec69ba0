//! Command-line front end: network documents in TOML, results as JSON or text.

pub mod commands;
pub mod document;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Pretty,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Bn,
    Cpt,
    Wcpt,
    Cpti,
    Mc,
    Lim,
    Limavg,
}

#[derive(Debug, Parser)]
#[command(
    name = "gbn",
    version,
    about = "Exact semantics for Bayesian networks with cycles"
)]
pub struct Cli {
    /// Output style; `machine` emits JSON.
    #[arg(long, value_enum, default_value_t = Format::Machine, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a network document.
    Validate { file: PathBuf },
    /// Decide a d-separation statement on the network graph.
    Dsep {
        file: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value = "")]
        given: String,
    },
    /// List cutsets of the network graph.
    Cutsets {
        file: PathBuf,
        #[arg(long)]
        minimal: bool,
    },
    /// Print the cutset Markov chain with its bottom components.
    Chain {
        file: PathBuf,
        #[arg(long)]
        cutset: Option<String>,
    },
    /// Compute one of the semantics.
    Semantics {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Comma-separated cutset; repeat for `cpti` (default: all minimal cutsets).
        #[arg(long)]
        cutset: Vec<String>,
        /// `uniform`, `dirac:BITS` or a TOML file of bitstring keys.
        #[arg(long)]
        gamma0: Option<String>,
    },
    /// Summarize cardinality, smoothness and limit behaviour for a cutset.
    Classify {
        file: PathBuf,
        #[arg(long)]
        cutset: Option<String>,
        #[arg(long)]
        gamma0: Option<String>,
    },
    /// Brute-force oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Apply Next literally and report every iterate with its running average.
    Iterate {
        file: PathBuf,
        #[arg(long)]
        cutset: Option<String>,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        gamma0: Option<String>,
    },
}

/// Exit status for an error: 2 capacity, 3 unsupported, 1 anything else.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<gbn_core::Error>() {
            return match e {
                gbn_core::Error::Capacity { .. } => 2,
                gbn_core::Error::Unsupported(_) => 3,
                gbn_core::Error::Validation(report)
                    if report.has(gbn_core::model::IssueKind::Capacity) =>
                {
                    2
                }
                _ => 1,
            };
        }
    }
    1
}

fn dispatch(cli: &Cli) -> anyhow::Result<commands::Outcome> {
    match &cli.command {
        Command::Validate { file } => commands::validate(file),
        Command::Dsep { file, x, y, given } => commands::dsep(file, x, y, given),
        Command::Cutsets { file, minimal } => commands::cutsets(file, *minimal),
        Command::Chain { file, cutset } => commands::chain(file, cutset.as_deref()),
        Command::Semantics {
            file,
            kind,
            cutset,
            gamma0,
        } => commands::semantics(file, *kind, cutset, gamma0.as_deref()),
        Command::Classify {
            file,
            cutset,
            gamma0,
        } => commands::classify(file, cutset.as_deref(), gamma0.as_deref()),
        Command::Oracle(OracleCommand::Iterate {
            file,
            cutset,
            steps,
            gamma0,
        }) => commands::oracle_iterate(file, cutset.as_deref(), *steps, gamma0.as_deref()),
    }
}

/// Runs one invocation, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            let text = match cli.format {
                Format::Machine => {
                    serde_json::to_string_pretty(&outcome.value).unwrap_or_default() + "\n"
                }
                Format::Pretty => render::pretty(&outcome.value),
            };
            let _ = out.write_all(text.as_bytes());
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code(&e)
        }
    }
}
