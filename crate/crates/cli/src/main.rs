mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyaforge::boltzmann::{Method, PointedClass};
use polyaforge::DegreeSet;

/// Enumeration and uniform sampling of unlabelled trees with restricted vertex degrees.
#[derive(Debug, Parser)]
#[command(name = "polyaforge", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact counts a_n, s_n, e_n, v_n, f_n with the identity n f_n = s_n + e_n + v_n.
    Count {
        #[command(flatten)]
        omega: OmegaArg,
        #[arg(long)]
        max_n: usize,
        #[arg(long, value_enum, default_value_t = CountFormat::Csv)]
        format: CountFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniform random trees of a fixed size, as NDJSON.
    Sample {
        #[command(flatten)]
        omega: OmegaArg,
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[command(flatten)]
        run: RunArgs,
        /// Restrict to one cycle-pointed class; `auto` gives the uniform unrooted tree.
        #[arg(long, default_value = "auto")]
        class: ClassArg,
        /// Emit per-sample CSV (index, diameter, class, attempts) instead of trees.
        #[arg(long)]
        stats_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs the invariant suite; exits 1 if any check fails.
    Verify {
        #[command(flatten)]
        omega: OmegaArg,
        #[arg(long, default_value_t = 100)]
        max_n: usize,
        #[arg(long, env = "POLYAFORGE_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Diameters of uniform random trees (columns omega, n, sample_idx, diameter).
    DiamStats {
        #[command(flatten)]
        omega: OmegaArg,
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Radius-k neighborhood census (columns code, count, n, k).
    LocalStats {
        #[command(flatten)]
        omega: OmegaArg,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// `uniform`: one random vertex per tree; `all`: every vertex of every tree.
        #[arg(long, value_enum, default_value_t = CensusArg::Uniform)]
        census: CensusArg,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimates the diameter scale constant, as JSON.
    Calibrate {
        #[command(flatten)]
        omega: OmegaArg,
        #[arg(long = "n", value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Diameter law of the continuum random tree.
    Crt {
        #[command(subcommand)]
        command: CrtCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum CrtCommand {
    /// P(D > x).
    Tail {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// E[D^k].
    Moment {
        #[arg(long)]
        k: u32,
    },
    /// CSV of (x, tail) on a grid.
    Table {
        #[arg(long, default_value_t = 3.0)]
        xmax: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct OmegaArg {
    /// Degree set, e.g. `1,3` or `1,2,3+`.
    #[arg(long)]
    omega: DegreeSet,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, env = "POLYAFORGE_SEED")]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value = "recursive")]
    method: Method,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CountFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CensusArg {
    Uniform,
    All,
}

#[derive(Debug, Clone, Copy)]
pub enum ClassArg {
    Auto,
    Fixed(PointedClass),
}

impl std::str::FromStr for ClassArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ClassArg::Auto);
        }
        s.parse::<PointedClass>().map(ClassArg::Fixed).map_err(|e| e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(commands::exit_code(&err))
        }
    }
}
