//! `m2m`: validation, distances, test functionals, coalescent simulation
//! and diagnostics for finite m2m spaces.
//!
//! Exit codes: 0 on success, 1 for invalid input or domain errors, 2 when
//! a computation budget is exhausted.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 0xC0A1_E5CE;

#[derive(Debug, Parser)]
#[command(name = "m2m", version, about = "Finite metric two-level measure spaces")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, global = true, default_value_t = m2m_core::DEFAULT_TOL)]
    pub tol: f64,

    /// Independent replicates for simulation and estimation commands.
    #[arg(long, global = true)]
    pub replicates: Option<usize>,

    /// Write the main result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceMode {
    /// Prokhorov distance between the moment measures on a shared space.
    Prokhorov,
    /// Two-level Prokhorov distance on a shared space.
    TwoLevel,
    /// Certified bounds for the two-level Gromov-Prokhorov distance.
    D2gp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TfMode {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an m2m file and report its size and mass.
    Validate { file: PathBuf },

    /// Distance between two m2m files.
    Distance {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, value_enum, default_value_t = DistanceMode::D2gp)]
        mode: DistanceMode,
        #[arg(long, default_value_t = 4)]
        multistarts: usize,
        #[arg(long, default_value_t = 8)]
        grid_points: usize,
        #[arg(long, default_value_t = 2_000_000)]
        max_evaluations: usize,
        /// Write the cross-distance block attaining the upper bound (d2gp).
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Append the wall time in seconds; makes output nondeterministic.
        #[arg(long)]
        timing: bool,
    },

    /// Evaluate a test functional on an m2m file.
    Tf {
        file: PathBuf,
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = TfMode::Exact)]
        mode: TfMode,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },

    /// Simulate the nested coalescent.
    Simulate {
        #[arg(long)]
        gamma_s: f64,
        #[arg(long)]
        gamma_g: f64,
        /// Number of species.
        #[arg(short = 'M')]
        m: usize,
        /// Individuals per species.
        #[arg(short = 'N')]
        n: usize,
        /// CSV of same- and cross-species coalescence times per replicate.
        #[arg(long)]
        distances: Option<PathBuf>,
        /// CSV of block counts per replicate.
        #[arg(long)]
        blocks: Option<PathBuf>,
        /// Times for the block counts; defaults to 0 and every event time.
        #[arg(long, value_delimiter = ',')]
        t_grid: Option<Vec<f64>>,
        /// JSON m2m file of the first replicate.
        #[arg(long)]
        m2m: Option<PathBuf>,
        /// Report Kolmogorov-Smirnov statistics against the exact laws.
        #[arg(long)]
        ks: bool,
    },

    /// Estimate Q_{M,N} over a grid and the limit statistic.
    Convergence {
        spec: PathBuf,
        #[arg(long)]
        gamma_s: f64,
        #[arg(long)]
        gamma_g: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        m_grid: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        n_grid: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        limit_replicates: usize,
        /// Evaluate each replicate exactly instead of by sampling.
        #[arg(long)]
        exact: bool,
        /// Monte-Carlo samples per replicate.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },

    /// Compactness profile over grids of K and delta.
    Diagnose {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        k_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        delta_grid: Vec<f64>,
        /// Also write PREFIX_dd.csv and PREFIX_mass.csv.
        #[arg(long)]
        histograms: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
