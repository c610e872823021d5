//! Command-line front end for pi-forge.
//!
//! Exit codes: 0 success, 1 I/O or internal error, 2 usage or validation
//! error, 3 ambiguous or inconclusive result, 4 cross-check mismatch,
//! 5 halted with a checkpoint saved.

mod commands;
mod report;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pi_forge::{Algorithm, Base};

pub use report::{AgmReport, Count, PhaseTimings, SCHEMA};

pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const AMBIGUOUS: i32 = 3;
    pub const MISMATCH: i32 = 4;
    pub const HALTED: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "pi-forge", version, about = "Certified digits of pi")]
pub struct Cli {
    /// Worker threads for the parallel sums (default: one per core).
    #[arg(long, global = true, env = "PI_FORGE_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute and certify digits with an AGM algorithm.
    Agm(AgmArgs),
    /// Extract one hexadecimal digit with the BBP spigot.
    Bbp(BbpArgs),
    /// Compare a hexadecimal run against spigot digits.
    Crosscheck(CrosscheckArgs),
    /// Run a quick end-to-end consistency check.
    Selftest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Borwein,
    Salamin,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Borwein => Algorithm::Borwein,
            AlgoArg::Salamin => Algorithm::Salamin,
        }
    }
}

#[derive(Debug, Args)]
pub struct AgmArgs {
    #[arg(long, value_enum, default_value_t = AlgoArg::Salamin)]
    pub algo: AlgoArg,

    /// Number of digits after the point.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub digits: u64,

    /// Output base, 10 or 16.
    #[arg(long, default_value = "10", value_parser = parse_base)]
    pub base: Base,

    /// Guard digits; sized automatically when omitted.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub guard: Option<u32>,

    /// Digit file; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    /// JSON report file.
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Snapshot file, saved after every step and resumed from if present.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,

    /// Stop after this many steps in this process (needs --checkpoint).
    #[arg(long, requires = "checkpoint")]
    pub halt_after: Option<u32>,
}

#[derive(Debug, Args)]
pub struct BbpArgs {
    /// 1-based position after the point.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=pi_forge::bbp::MAX_POSITION))]
    pub position: u64,

    /// Fixed working precision in bits; escalates automatically when omitted.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub precision_bits: Option<u32>,

    /// Escalation cap in bits.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(4..=64))]
    pub max_precision_bits: u32,
}

#[derive(Debug, Args)]
pub struct CrosscheckArgs {
    /// Hexadecimal digit file ("3." + digits); computed when omitted.
    #[arg(long, conflicts_with_all = ["digits", "algo"])]
    pub input: Option<PathBuf>,

    /// Hex digits to compute when no input is given.
    #[arg(long, required_unless_present = "input", value_parser = clap::value_parser!(u64).range(1..))]
    pub digits: Option<u64>,

    #[arg(long, value_enum)]
    pub algo: Option<AlgoArg>,

    /// Comma-separated 1-based positions.
    #[arg(long, value_delimiter = ',', conflicts_with = "random")]
    pub positions: Vec<u64>,

    /// Check this many distinct random positions instead.
    #[arg(long)]
    pub random: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(4..=64))]
    pub max_precision_bits: u32,
}

fn parse_base(s: &str) -> Result<Base, String> {
    s.parse().map_err(|e: pi_forge::Error| e.to_string())
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String, std::io::Error),
    Core(pi_forge::Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        use pi_forge::Error as E;
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io(..) => exit::IO,
            CliError::Core(E::Config(_) | E::Parse(_) | E::Budget(_)) => exit::USAGE,
            CliError::Core(_) => exit::IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Io(what, e) => write!(f, "{what}: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<pi_forge::Error> for CliError {
    fn from(e: pi_forge::Error) -> Self {
        CliError::Core(e)
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return exit::USAGE;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return exit::IO;
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Agm(a) => commands::agm(a),
        Command::Bbp(a) => commands::bbp(a),
        Command::Crosscheck(a) => commands::crosscheck(a),
        Command::Selftest => commands::selftest(),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
