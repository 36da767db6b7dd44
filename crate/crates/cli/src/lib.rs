//! `thinlab`: command-line access to the thinning laboratory.
//!
//! Every subcommand is a pure function of its arguments (and seed) that
//! returns the text to emit, so reruns are byte-identical.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

mod asep;
pub mod error;
mod measure;
pub mod output;
mod sample;
mod spin;

pub use error::CliError;

/// Environment variable overriding the maximum dense table length.
pub const MAX_DENSE_ENV: &str = "THINLAB_MAX_DENSE";

#[derive(Debug, Parser)]
#[command(name = "thinlab", version, about = "Thinning-invariant arrays, mean-field spin chains and ASEP profiles")]
pub struct Cli {
    /// Write the result to this file instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thin a joint measure file down to k coordinates
    Thin(ThinArgs),
    /// Build the n-th measure generated by a profile (or a mixture of profiles)
    Build(BuildArgs),
    /// Check thinning invariance of a generated or supplied family
    Check(CheckArgs),
    /// Oriented mean-field spin chains
    #[command(subcommand)]
    Spin(SpinCommand),
    /// Mean-field asymmetric exclusion
    #[command(subcommand)]
    Asep(AsepCommand),
    /// Seeded Monte Carlo checks
    #[command(subcommand)]
    Sample(SampleCommand),
}

#[derive(Debug, Args)]
pub struct ThinArgs {
    /// Joint measure JSON file
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Emit [index, weight] pairs for the nonzero entries only
    #[arg(long)]
    pub sparse: bool,
}

/// Where a profile comes from: files (optionally mixed) or a kink shorthand.
#[derive(Debug, Args, Clone)]
pub struct ProfileSource {
    /// Profile JSON file; repeat for a mixture
    #[arg(long = "profile")]
    pub profiles: Vec<PathBuf>,
    /// Mixing weights, one per profile
    #[arg(long, value_delimiter = ',')]
    pub mix: Vec<f64>,
    /// Use the kink profile on {-,+} with the jump at this point
    #[arg(long, conflicts_with = "profiles")]
    pub kink: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub source: ProfileSource,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub sparse: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub source: ProfileSource,
    /// Largest level of the generated family
    #[arg(long = "K", default_value_t = 5)]
    pub big_k: usize,
    /// Check these joint measure files instead (levels 1..K in any order)
    #[arg(long, num_args = 1.., conflicts_with_all = ["profiles", "kink"])]
    pub family: Vec<PathBuf>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args, Clone)]
pub struct ChainArgs {
    /// Field strength of the Curie–Weiss interaction
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub b: f64,
    /// Interaction JSON file (replaces the Curie–Weiss interaction)
    #[arg(long)]
    pub interaction: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SpinCommand {
    /// Exact Gibbs state (or its k-site thinning)
    Gibbs {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Ω_N(β)/N for N up to Nmax
    Pressure {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long = "Nmax")]
        n_max: usize,
    },
    /// Ω_{N1+N2} - Ω_{N1} - Ω_{N2} for all admissible pairs
    Subadd {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long = "Nmax")]
        n_max: usize,
    },
    /// Exhaustive ground states
    Ground {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long = "N")]
        big_n: usize,
    },
    /// Infinite-volume ground-state phase of the Curie–Weiss chain
    Phase {
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum AsepCommand {
    /// Stationary measure of one particle-number sector
    Stationary {
        #[arg(long)]
        q: f64,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(long)]
        n: usize,
    },
    /// Limiting profile u(t), φ(t) on a grid
    Profile {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Finite-N site densities against φ at cell midpoints
    Compare {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        big_n: Vec<usize>,
        /// One row per N with the L1 error only
        #[arg(long)]
        summary: bool,
    },
    /// φ for the sweep q = 0.525, 0.550, ..., 0.975
    Figure1 {
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        /// Custom sweep as start:stop:step
        #[arg(long = "q-sweep")]
        q_sweep: Option<String>,
    },
    /// Integral-equation residual of the closed form on a grid
    Residual {
        #[arg(long, value_delimiter = ',', default_values_t = [0.6, 0.75, 0.9])]
        q: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.75])]
        rho: Vec<f64>,
        /// Interior grid step in t
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 48)]
        order: usize,
    },
}

#[derive(Debug, Args, Clone)]
pub struct SeedArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Debug, Subcommand)]
pub enum SampleCommand {
    /// Weak law of large numbers for block statistics
    Lln {
        #[command(flatten)]
        source: ProfileSource,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [20, 50, 100, 200])]
        n: Vec<usize>,
        /// Open intervals a:b, comma separated
        #[arg(long, default_value = "0:0.5,0.5:1")]
        intervals: String,
        /// One function per interval, values over the alphabet: "1,0;0,1".
        /// Defaults to the indicator of symbol r on interval r.
        #[arg(long)]
        functions: Option<String>,
    },
    /// Moments of uniform order statistics
    Moments {
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [2, 5, 10])]
        n: Vec<usize>,
        /// Report E[t_j t_k] instead of E[t_k]
        #[arg(long)]
        second: bool,
    },
    /// Empirical law of (X_1, ..., X_n) against the exact measure
    Joint {
        #[command(flatten)]
        source: ProfileSource,
        #[command(flatten)]
        seed: SeedArgs,
        #[arg(long)]
        n: usize,
    },
}

/// Apply the dense-cap override from the environment, if set.
pub fn apply_env() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(MAX_DENSE_ENV) {
        let cap: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{MAX_DENSE_ENV}: expected a positive integer, got {v:?}")))?;
        if cap == 0 {
            return Err(CliError::Input(format!("{MAX_DENSE_ENV} must be positive")));
        }
        thinning::measures::set_max_dense_len(cap);
    }
    Ok(())
}

/// Run a parsed command; `command_line` is echoed into CSV metadata.
pub fn run(cli: &Cli, command_line: &str) -> Result<String, CliError> {
    match &cli.command {
        Command::Thin(a) => measure::thin(a),
        Command::Build(a) => measure::build(a),
        Command::Check(a) => measure::check(a, command_line),
        Command::Spin(c) => spin::run(c, command_line),
        Command::Asep(c) => asep::run(c, command_line),
        Command::Sample(c) => sample::run(c, command_line),
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub(crate) fn check_finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Precondition(format!("--{name} must be finite, got {v}")))
    }
}
