//! Command-line grammar.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "cshor", version, about = "Compiled modular-exponentiation circuits and order-finding simulation")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Output format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Compare against the bundled reference values and exit 1 on a mismatch.
    #[arg(long, global = true)]
    pub diff_paper: bool,
    /// Directory to write CSV/JSON artifacts and `manifest.json` into.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<std::path::PathBuf>,
    /// Write the run manifest to this path.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub manifest: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Reproduce the numeric tables.
    #[command(subcommand)]
    Tables(TablesCmd),
    /// Inspect, verify and cost circuits.
    Circuit(CircuitArgs),
    /// Synthesize a circuit for a (compiled) modular exponentiation.
    Synth(SynthArgs),
    /// Simulate the period-finding toy model.
    Simulate(SimulateArgs),
    /// Factor N with simulated order finding.
    Factor(FactorArgs),
    /// Re-run a manifest and check that outputs are byte-identical.
    Replay(ReplayArgs),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TablesCmd {
    /// Orders of every base coprime to N.
    Orders {
        #[arg(long = "N")]
        n: u64,
    },
    /// Allowed periods of every odd semiprime below a bound.
    AllowedPeriods {
        #[arg(long = "max-N")]
        max_n: u64,
    },
    /// Measurement probabilities of the period-p toy model.
    Probabilities(Registers),
    /// Separability index of each probability row.
    Separability(Registers),
    /// Truth table of a (compiled) modular exponentiation.
    Truth(TableSpec),
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct Registers {
    #[arg(long, default_value_t = 3)]
    pub m: u32,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = Direction::Forward)]
    pub direction: Direction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    None,
    Log,
    Affine,
    Rank,
    Full,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Log => "log",
            Self::Affine => "affine",
            Self::Rank => "rank",
            Self::Full => "full",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TableSpec {
    #[arg(long)]
    pub a: u64,
    #[arg(long = "N")]
    pub n: u64,
    #[arg(long = "compile", value_enum, default_value_t = Strategy::None)]
    pub strategy: Strategy,
    /// Input bits; defaults to the reference width for matching figures, else
    /// ceil(log2 r), plus one when r is not a power of two.
    #[arg(long)]
    pub n_in: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitAction {
    Show,
    Verify,
    Cost,
}

#[derive(Debug, Args, Serialize)]
pub struct CircuitArgs {
    #[arg(value_enum)]
    pub action: CircuitAction,
    /// Bundled figure id (e.g. f4_21).
    #[arg(long, conflicts_with_all = ["file", "all"])]
    pub id: Option<String>,
    /// Circuit JSON file.
    #[arg(long)]
    pub file: Option<std::path::PathBuf>,
    /// Every bundled figure.
    #[arg(long)]
    pub all: bool,
    /// Truth-table JSON to verify against.
    #[arg(long)]
    pub table: Option<std::path::PathBuf>,
    /// Use the literal drawing rather than the stored circuit.
    #[arg(long)]
    pub as_drawn: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    #[command(flatten)]
    pub spec: TableSpec,
    #[arg(long, default_value_t = 10_000)]
    pub max_cost: u64,
    #[arg(long, default_value_t = 10_000)]
    pub max_gates: usize,
    /// Forbid negative-polarity controls.
    #[arg(long)]
    pub positive_only: bool,
    /// Skip the exhaustive fallback search.
    #[arg(long)]
    pub no_search: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Period of the toy function x -> x mod p.
    #[arg(long, conflicts_with = "id")]
    pub p: Option<u64>,
    /// Bundled figure circuit applied to a uniform input register.
    #[arg(long)]
    pub id: Option<String>,
    #[command(flatten)]
    pub registers: Registers,
    /// Depolarizing strength (1 = noiseless, 0 = fully mixed).
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also emit the reduced density matrix of the input register.
    #[arg(long)]
    pub rho: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct FactorArgs {
    #[arg(long = "N")]
    pub n: u64,
    /// Base; scans coprime bases upward from 2 when omitted.
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long, default_value_t = 500)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub path: std::path::PathBuf,
}
