//! Command-line front end for ccq-MAC rate regions and code simulation.
//!
//! The binary is a thin wrapper: [`Cli`] holds the parsed arguments and
//! [`run`] executes one subcommand, writing its report to any `Write`.

pub mod commands;
pub mod error;
pub mod format;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::run;
pub use error::{CliError, CliResult};

pub const DEFAULT_STARTS: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "ccqmac", version, about = "Rate regions and finite-blocklength codes for classical-classical-quantum multiple access channels")]
pub struct Cli {
    /// Worker threads; output does not depend on this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Rate pairs (R_M, R_N) with conferencing encoders.
    Conf,
    /// Rate triples (S_C, S_X, S_Y) with a common message.
    Comm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DecoderArg {
    /// Common-message measurement followed by private measurements.
    TwoStage,
    /// One square-root measurement over all output states.
    Joint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ResidualArg {
    /// The leftover outcome counts as a decoding failure.
    Error,
    /// The leftover operator is added to the last outcome.
    Fold,
}

/// Region selection and optimizer controls shared by several commands.
#[derive(Clone, Debug, Args)]
pub struct RegionArgs {
    /// Conference budget of sender 1 in bits per channel use (`inf` allowed).
    #[arg(long = "conf-c", default_value_t = 0.0)]
    pub conf_c: f64,
    /// Conference budget of sender 2 in bits per channel use (`inf` allowed).
    #[arg(long = "conf-d", default_value_t = 0.0)]
    pub conf_d: f64,
    /// Number of support directions (default 64 for pairs, 200 for triples).
    #[arg(long)]
    pub directions: Option<usize>,
    /// Random starting laws per direction.
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    pub starts: usize,
    /// Auxiliary alphabet size (default |X||Y|+3).
    #[arg(long = "u-size")]
    pub u_size: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate a rate region by support values in a grid of directions.
    #[command(after_help = commands::REGION_HELP)]
    Region {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Conf)]
        mode: ModeArg,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long)]
        seed: u64,
        /// Frontier CSV; metadata goes to the same path with extension `.meta.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify a rate point against a region approximation.
    #[command(after_help = commands::CHECK_HELP)]
    Check {
        /// Comma-separated rates: `R_M,R_N` or `S_C,S_X,S_Y`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Frontier CSV written by `region`; replaces the channel options.
        #[arg(long, conflicts_with_all = ["channel", "seed"])]
        frontier: Option<PathBuf>,
        #[arg(long, required_unless_present = "frontier")]
        channel: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::Conf)]
        mode: ModeArg,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, required_unless_present = "frontier")]
        seed: Option<u64>,
    },
    /// Build random codes and evaluate their exact success probability.
    #[command(after_help = commands::SIMULATE_HELP)]
    Simulate {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Comm)]
        mode: ModeArg,
        /// Blocklengths, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        blocklength: Vec<usize>,
        /// Message counts: `M,K,T` (comm) or `M,N` (conf), used at every blocklength.
        #[arg(long, value_delimiter = ',', conflicts_with = "rates", required_unless_present = "rates")]
        messages: Vec<usize>,
        /// Rates in bits per use; counts are ceil(2^(l*R)).
        #[arg(long, value_delimiter = ',')]
        rates: Vec<f64>,
        /// Input law JSON `{p, r, s}`; optimized for the sum rate when absent.
        #[arg(long)]
        law: Option<PathBuf>,
        /// Private typicality width in bits (`inf` for support projectors).
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_enum, default_value_t = DecoderArg::TwoStage)]
        decoder: DecoderArg,
        #[arg(long, value_enum, default_value_t = ResidualArg::Error)]
        residual: ResidualArg,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long)]
        seed: u64,
        /// Result CSV; printed to standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory receiving one code manifest per blocklength.
        #[arg(long = "code-dir")]
        code_dir: Option<PathBuf>,
    },
    /// Compare conferencing regions for two budget pairs.
    #[command(after_help = commands::COMPARE_HELP)]
    Compare {
        #[arg(long)]
        channel: PathBuf,
        #[command(flatten)]
        region: RegionArgs,
        /// Second budget pair `C2,D2`.
        #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
        against: Vec<f64>,
        #[arg(long)]
        seed: u64,
        /// Per-direction CSV; printed to standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
