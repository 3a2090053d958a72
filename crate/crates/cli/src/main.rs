//! `caterpillar`: count, estimate and score the biggest caterpillar subtree.
//!
//! Exit status: 0 success, 1 computation or I/O failure, 2 usage error,
//! 3 `k` not below the truncation order `m`, 4 rejected input (Newick,
//! permutation, 132 pattern), 5 size guard or enumeration cap exceeded.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use caterpillar_core::real::Rounding;

use crate::output::{CliError, Fmt};

#[derive(Parser, Debug)]
#[command(
    name = "caterpillar",
    version,
    about = "Biggest caterpillar subtrees of rooted binary trees"
)]
struct Cli {
    /// Fixed number of decimals for real-valued output
    /// (default: 10 significant digits, 3 decimals for `expected`).
    #[arg(long, global = true)]
    places: Option<usize>,

    /// Truncate instead of rounding half to even; reproduces tables printed
    /// with truncated digits.
    #[arg(long, global = true)]
    truncate: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum FamilyArg {
    Ordered,
    Unordered,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Which {
    /// gamma <= k
    Minus,
    /// gamma >= k
    Plus,
    /// gamma = k
    Exact,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ExpectedModeArg {
    Exact,
    Approx,
    Log2,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ProbMode {
    Asym,
    Exact,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficient table of trees by gamma: CSV `n,count`.
    Counts {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "minus")]
        which: Which,
        #[arg(long)]
        n_max: usize,
    },
    /// Mean gamma of uniform ordered trees: CSV `n,value`.
    Expected {
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ExpectedModeArg,
        /// Largest size accepted by the exact and approx modes.
        #[arg(long, default_value_t = 2000)]
        max_n: usize,
    },
    /// Dominant singularity and amplitude of the gamma <= k family.
    Asympt {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        k: usize,
        /// Truncation order for the unordered family.
        #[arg(long, default_value_t = 30)]
        m: usize,
    },
    /// Probability that an unordered tree has a caterpillar bigger than k:
    /// CSV `n,k,prob`.
    ProbCurve {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1)]
        step: usize,
        #[arg(long, default_value_t = 30)]
        m: usize,
        #[arg(long, value_enum, default_value = "asym")]
        mode: ProbMode,
    },
    /// Score the Newick trees of a file, one per line:
    /// CSV `line,n,gamma,colless,prob_gamma_le_exact_or_asym`.
    Score { file: std::path::PathBuf },
    /// Map a tree to its 132-avoiding permutation or back.
    MapPerm(MapPermArgs),
    /// Extraction family of any permutation: CSV `i,value,rtilde,avoids_231`.
    Rtilde {
        #[arg(long)]
        perm: String,
    },
    /// Exhaustive gamma histogram next to the engine's prediction:
    /// CSV `gamma,enumerated,predicted`. Capped; see CATERPILLAR_MAX_N.
    Histogram {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
    },
    /// Print every reference table in one run.
    SeedTables {
        /// Largest n for which the exact mean of gamma is computed.
        #[arg(long, default_value_t = 1000)]
        max_exact_n: usize,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct MapPermArgs {
    /// Space-separated permutation, e.g. "4 5 3 1 2".
    #[arg(long)]
    perm: Option<String>,
    /// A binary tree in Newick notation.
    #[arg(long)]
    newick: Option<String>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let fmt = Fmt {
        places: cli.places,
        rounding: if cli.truncate {
            Rounding::TowardZero
        } else {
            Rounding::HalfEven
        },
    };
    match cli.command {
        Command::Counts {
            family,
            k,
            which,
            n_max,
        } => commands::counts(family, k, which, n_max),
        Command::Expected { n, mode, max_n } => commands::expected(&n, mode, max_n, fmt),
        Command::Asympt { family, k, m } => commands::asympt(family, k, m, fmt),
        Command::ProbCurve {
            k,
            n_min,
            n_max,
            step,
            m,
            mode,
        } => commands::prob_curve(&k, n_min, n_max, step, m, mode, fmt),
        Command::Score { file } => commands::score(&file, fmt),
        Command::MapPerm(args) => match (args.perm, args.newick) {
            (Some(p), _) => commands::map_perm_from_perm(&p),
            (None, Some(t)) => commands::map_perm_from_newick(&t),
            (None, None) => unreachable!("clap enforces one input"),
        },
        Command::Rtilde { perm } => commands::rtilde(&perm),
        Command::Histogram { family, n } => commands::histogram(family, n),
        Command::SeedTables { max_exact_n } => commands::seed_tables(max_exact_n, fmt),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // deep trees recurse once per level
    let worker = std::thread::Builder::new()
        .stack_size(1 << 30)
        .spawn(move || run(cli))
        .expect("spawning the worker thread");
    match worker.join() {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            e.report();
            ExitCode::from(e.code)
        }
        Err(_) => ExitCode::FAILURE,
    }
}
