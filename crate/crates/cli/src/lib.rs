//! Command-line pipeline for solving and verifying fractional superalgebras.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod commands;
mod render;

pub use commands::{report_all, Outcome};

pub const SCHEMA: &str = "report_v1";

#[derive(Debug, Parser)]
#[command(name = "fracsusy", version, about = "Exact checks for S_n-graded extensions of Lie algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve the linear system for the cubic structure constants b.
    Solve,
    /// Check the generalized Jacobi identities on seeded random inputs.
    VerifyIdentities,
    /// Check the Hopf structure of the enveloping side.
    VerifyHopf,
    /// Check a dual Hopf algebra and its pairing with the enveloping side.
    VerifyDual,
    /// Check the differential-operator realization on z^m θ^k.
    VerifyRealization,
    /// Run every built-in case and collect one report.
    ReportAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::VerifyIdentities => "verify-identities",
            Command::VerifyHopf => "verify-hopf",
            Command::VerifyDual => "verify-dual",
            Command::VerifyRealization => "verify-realization",
            Command::ReportAll => "report-all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Options {
    /// Built-in Lie algebra.
    #[arg(long, global = true, default_value = "sl2", conflicts_with = "spec")]
    pub builtin: String,
    /// Spec file with [algebra], [representation] and [grading] sections.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Built-in representation: scalar, spinor, spinor_plus_scalar, vector.
    #[arg(long, global = true, default_value = "spinor")]
    pub rep: String,
    /// Grading order.
    #[arg(long = "n", global = true)]
    pub n: Option<u32>,
    /// Number of graded generators (scalar representation, duals).
    #[arg(long = "N", global = true)]
    pub size: Option<usize>,
    /// Normalization pin such as b3_222=6.
    #[arg(long, global = true)]
    pub pin: Option<String>,
    /// Placement convention for the equivariance rows: cyclic or full.
    #[arg(long, global = true, default_value = "cyclic")]
    pub convention: String,
    /// Row families: full, equivariance or graded_jacobi.
    #[arg(long, global = true, default_value = "full")]
    pub subsystem: String,
    /// Word-length cap for pairing checks.
    #[arg(long, global = true, default_value_t = 4)]
    pub cap: usize,
    /// z-degree truncation of the realization.
    #[arg(long = "M", global = true, default_value_t = 8)]
    pub m: usize,
    /// Dual: translation, single_generator or sl2_spinor.
    #[arg(long, global = true)]
    pub dual: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, env = "FRACSUSY_SEED", default_value_t = 0x5eed_f5a5, value_parser = parse_seed)]
    pub seed: u64,
    /// Random inputs per identity.
    #[arg(long, global = true, default_value_t = 100)]
    pub samples: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            builtin: "sl2".into(),
            spec: None,
            rep: "spinor".into(),
            n: None,
            size: None,
            pin: None,
            convention: "cyclic".into(),
            subsystem: "full".into(),
            cap: 4,
            m: 8,
            dual: None,
            format: Format::Text,
            seed: 0x5eed_f5a5,
            samples: 100,
        }
    }
}

/// Accepts decimal or `0x`-prefixed hex.
pub fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.parse(),
    }
    .map_err(|e| format!("bad seed `{s}`: {e}"))
}

/// Errors that prevent a command from running at all.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub Vec<String>);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for d in &self.0 {
            writeln!(f, "error: {d}")?;
        }
        Ok(())
    }
}

impl From<fracsusy::Error> for UsageError {
    fn from(e: fracsusy::Error) -> Self {
        UsageError(vec![e.to_string()])
    }
}

pub struct Rendered {
    pub exit_code: i32,
    pub stdout: String,
}

pub fn run(command: Command, opts: &Options) -> Result<Outcome, UsageError> {
    match command {
        Command::Solve => commands::solve(opts),
        Command::VerifyIdentities => commands::verify_identities(opts),
        Command::VerifyHopf => commands::verify_hopf(opts),
        Command::VerifyDual => commands::verify_dual(opts),
        Command::VerifyRealization => commands::verify_realization(opts),
        Command::ReportAll => commands::report_all(),
    }
}

pub fn envelope(command: Command, outcome: &Outcome) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command.name(),
        "pass": outcome.pass,
        "input": outcome.input,
        "result": outcome.result,
    })
}

/// Runs a command and formats it; exit code 0 on pass, 1 on a failed check,
/// 2 when the input could not be used.
pub fn execute(command: Command, opts: &Options) -> Rendered {
    match run(command, opts) {
        Ok(outcome) => {
            let stdout = match opts.format {
                Format::Json => {
                    serde_json::to_string_pretty(&envelope(command, &outcome)).expect("report serializes") + "\n"
                }
                Format::Text => render::text(command, &outcome),
            };
            Rendered {
                exit_code: if outcome.pass { 0 } else { 1 },
                stdout,
            }
        }
        Err(e) => Rendered {
            exit_code: 2,
            stdout: match opts.format {
                Format::Json => {
                    serde_json::to_string_pretty(&json!({
                        "schema": SCHEMA,
                        "command": command.name(),
                        "errors": e.0,
                    }))
                    .expect("errors serialize")
                        + "\n"
                }
                Format::Text => e.to_string(),
            },
        },
    }
}
