//! `cuspdiff`: command-line front end.
//!
//! Exit status is 0 on success, 1 when a checked invariant fails and 2 on
//! invalid input. Every failure also writes one JSON line to stderr of the
//! form `{"error":{"kind":..,"exit_code":..,"message":..}}`.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CoeffsArgs, CongruenceArgs, ExperimentCommand, Gl2Command, SieveCommand};
use config::{CliConfig, ConfigArgs};

#[derive(Parser, Debug)]
#[command(name = "cuspdiff", version, about = "Prime divisors of differences of eigenform coefficients")]
#[command(after_help = "Configuration precedence: flags, then CUSPDIFF_* environment variables, \
then the --config TOML file, then built-in defaults.")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print q-expansion coefficients a(0..N) of the weight-K eigenform
    Coeffs(CoeffsArgs),
    /// Matrix counts in GL2(Z/l^n) and the trace-equal density
    #[command(subcommand)]
    Gl2(Gl2Command),
    /// Sieve function values and divisor-count bounds
    #[command(subcommand)]
    Sieve(SieveCommand),
    /// Per-prime difference experiments
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Search for a fixed modulus dividing every coefficient difference
    Congruence(CongruenceArgs),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cuspdiff::Error),
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Check(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Config { .. } => "invalid_config",
            CliError::Usage(_) => "usage",
            CliError::Check(_) => "check_failed",
            CliError::Io { .. } => "io",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_invariant_violation() => 1,
            CliError::Core(cuspdiff::Error::FactorizationIncomplete { .. }) => 1,
            CliError::Core(cuspdiff::Error::NoSignChange { .. }) => 1,
            CliError::Check(_) => 1,
            _ => 2,
        }
    }
}

fn report_error(kind: &str, code: u8, message: &str) {
    let line = serde_json::json!({
        "error": { "kind": kind, "exit_code": code, "message": message }
    });
    eprintln!("{line}");
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = CliConfig::resolve(&cli.config)?;
    config.install_threads()?;
    match cli.command {
        Command::Coeffs(args) => commands::coeffs(&args, &config),
        Command::Gl2(cmd) => commands::gl2(&cmd, &config),
        Command::Sieve(cmd) => commands::sieve(&cmd),
        Command::Experiment(cmd) => commands::experiment(&cmd, &config),
        Command::Congruence(args) => commands::congruence(&args, &config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let message = e.kind().to_string();
            report_error("usage", 2, &message);
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            report_error(e.kind(), code, &e.to_string());
            ExitCode::from(code)
        }
    }
}
