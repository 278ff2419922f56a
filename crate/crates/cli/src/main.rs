//! Command-line driver for the quantcat verification toolkit.
//!
//! Subcommands map one-to-one onto the library's verification suites:
//!
//! * `verify matreg|nctorus|prequant|envelope` — run a backend suite;
//! * `props` — run the categorical regression fixtures;
//! * `limit <file>` — compute the limits of a category file's diagram;
//! * `equiv <a> <b>` — decide equivalence of two category files;
//! * `check <file>` — validate a category file against the category laws.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or I/O error.
//! `QUANTCAT_THREADS` caps the worker-thread count. Reports are byte-stable
//! across runs with the same configuration except for the `generated_at_unix`
//! field of the JSON envelope.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::Format;

#[derive(Parser)]
#[command(name = "quantcat", version, about = "Quantization-category verifier")]
struct Cli {
    /// Report formats to emit (comma-separated: json, csv, md).
    #[arg(long, global = true, value_delimiter = ',', default_value = "json")]
    format: Vec<Format>,

    /// Directory to write report files into. Without it, reports go to
    /// stdout and the human summary to stderr.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a backend verification suite.
    #[command(subcommand)]
    Verify(Backend),
    /// Run the categorical regression fixtures.
    Props,
    /// Compute the limits of a category file's diagram.
    Limit {
        /// Category file; its `diagram` block selects the index diagram
        /// (defaults to the whole category).
        file: PathBuf,
    },
    /// Decide whether two category files are equivalent categories.
    Equiv {
        /// First category file.
        file_a: PathBuf,
        /// Second category file.
        file_b: PathBuf,
    },
    /// Validate a category file against the category laws.
    Check {
        /// Category file to validate.
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum Backend {
    /// Fuzzy-sphere matrix regularization: product, commutator, trace and
    /// norm convergence over a ladder of matrix sizes.
    Matreg {
        /// Smallest level (matrix dimension kmin+1).
        #[arg(long, default_value_t = 2)]
        kmin: usize,
        /// Largest level.
        #[arg(long, default_value_t = 24)]
        kmax: usize,
        /// Decay exponent margin: residuals must fall like ħ^(1+epsilon).
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Norm-contraction tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Noncommutative-torus strict deformation: residual decay in θ = 1/q
    /// plus the density-rank surrogate.
    Nctorus {
        /// Levels as an inclusive range "3..48" or a comma list "3,4,5,8".
        #[arg(long, default_value = "3..48")]
        qlist: String,
        /// Hermiticity tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Prequantization identities, exact in rational arithmetic.
    Prequant {
        /// Probe degree: all monomials up to this total degree (max 12).
        #[arg(long, default_value_t = 6)]
        dmax: u32,
    },
    /// Enveloping-operator identities and generator relations, exact in
    /// rational arithmetic.
    Envelope {
        /// Probe degree: all monomials up to this total degree (max 6).
        #[arg(long, default_value_t = 6)]
        dmax: u32,
    },
}

/// A command that could not run to a verdict.
pub enum Failure {
    /// Misuse: bad flag values, unreadable paths, broken environment.
    Usage(String),
    /// The input was readable but semantically unusable for this command.
    Content(String),
}

impl From<quantcat::Error> for Failure {
    fn from(e: quantcat::Error) -> Self {
        match e {
            quantcat::Error::Io(_) => Failure::Usage(e.to_string()),
            _ => Failure::Content(e.to_string()),
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    match std::env::var("QUANTCAT_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("QUANTCAT_THREADS must be a positive integer, got '{v}'")))?;
            if n == 0 {
                return Err(Failure::Usage("QUANTCAT_THREADS must be at least 1".into()));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    init_threads()?;
    let outcome = match cli.command {
        Command::Verify(Backend::Matreg {
            kmin,
            kmax,
            epsilon,
            tol,
        }) => commands::verify_matreg(kmin, kmax, epsilon, tol)?,
        Command::Verify(Backend::Nctorus { qlist, tol }) => commands::verify_nctorus(&qlist, tol)?,
        Command::Verify(Backend::Prequant { dmax }) => commands::verify_prequant(dmax)?,
        Command::Verify(Backend::Envelope { dmax }) => commands::verify_envelope(dmax)?,
        Command::Props => commands::props()?,
        Command::Limit { file } => commands::limit(&file)?,
        Command::Equiv { file_a, file_b } => commands::equiv(&file_a, &file_b)?,
        Command::Check { file } => commands::check(&file)?,
    };
    let pass = outcome.pass;
    output::emit(&outcome, &cli.format, cli.out.as_deref())?;
    Ok(pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Content(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
