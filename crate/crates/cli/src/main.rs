//! `amalg`: command-line entry point.
//!
//! Exit status is 0 when every verdict passes, 1 when one fails and 2 on
//! any error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "amalg", version, about = "Operator-valued free probability on finite matrix models")]
pub struct Cli {
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for pass/fail verdicts.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Maximal order (of moments, cumulants or relations).
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Output file. Without it results go to stdout, and also to
    /// `$AMALG_OUT_DIR/<command>.<ext>` when that variable is set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Non-crossing partitions.
    Nc {
        #[command(subcommand)]
        op: NcOp,
    },
    /// Consistency checks of a matrix context.
    Algebra {
        #[command(subcommand)]
        op: AlgebraOp,
    },
    /// One operator-valued cumulant of model variables.
    Cumulant {
        #[arg(long)]
        context: Option<PathBuf>,
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated variable indices.
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<usize>,
        /// B, D or scalar.
        #[arg(long, default_value = "B")]
        target: String,
        /// JSON file with the interleaved coefficients.
        #[arg(long)]
        coeffs: Option<PathBuf>,
    },
    /// Freeness-with-amalgamation tests.
    Freeness {
        #[command(subcommand)]
        op: FreenessOp,
    },
    /// Canonical Fock-space model.
    Fock {
        #[command(subcommand)]
        op: FockOp,
    },
    /// Conjugate variables and liberation gradients.
    Liberation {
        #[command(subcommand)]
        op: LiberationOp,
    },
    /// Gaussian band matrices with a variance profile.
    Bandmatrix {
        #[command(subcommand)]
        op: BandOp,
    },
    /// Block-Haar conjugation over the diagonal constants.
    Haar {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![8, 32, 128])]
        ks: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        cumulant_trials: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum NcOp {
    Count {
        #[arg(long)]
        n: usize,
        /// Print a JSON object instead of the bare number.
        #[arg(long)]
        json: bool,
    },
    List {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum AlgebraOp {
    Check {
        #[arg(long)]
        context: PathBuf,
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FreenessTest {
    Mixed,
    Factorization,
    Restriction,
    Rcyclic,
}

#[derive(Debug, clap::Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub context: Option<PathBuf>,
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum FreenessOp {
    /// Mixed cumulants of the first two variable groups.
    Mixed {
        #[command(flatten)]
        files: ModelArgs,
        #[arg(long, default_value = "D")]
        target: String,
        #[arg(long, default_value_t = 8)]
        draws: usize,
    },
    /// `k_B` against `F(k_B(F))` and `k_D(F)`.
    Factorization {
        #[command(flatten)]
        files: ModelArgs,
        #[arg(long, default_value_t = 8)]
        draws: usize,
    },
    /// `k_D` against `k_B` on `D`-arguments.
    Restriction {
        #[command(flatten)]
        files: ModelArgs,
        #[arg(long, default_value_t = 8)]
        draws: usize,
    },
    /// Vanishing pattern of scalar cumulants of matrix entries; the
    /// variables are the entries in row-major order.
    Rcyclic {
        #[command(flatten)]
        files: ModelArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum FockOp {
    /// `E(b_0 Y_{i_1} b_1 ⋯ Y_{i_m} b_m)`.
    Moment {
        /// A series file, or a model file of type "fock".
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        indices: Vec<usize>,
        /// JSON file with the `m + 1` coefficients.
        #[arg(long)]
        coeffs: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum LiberationOp {
    /// Verify the model's conjugate variables (or least-squares ones).
    Conjugate {
        #[command(flatten)]
        files: ModelArgs,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value_t = 4)]
        draws: usize,
    },
    /// Verify a liberation gradient of `(target⟨a1⟩ : B)`.
    Gradient {
        #[command(flatten)]
        files: ModelArgs,
        #[arg(long, default_value = "D")]
        target: String,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value_t = 4)]
        draws: usize,
    },
    /// `E_{D'}(Σ [J_i, X_i]) c^{-1} dim D`; passes when it vanishes.
    Commutator {
        #[command(flatten)]
        files: ModelArgs,
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum BandOp {
    Simulate {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 60)]
        bins: usize,
    },
    Limit {
        #[arg(long)]
        profile: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
