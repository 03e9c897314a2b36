//! `swkernel`: kernels, moduli grids, Wigner values and verification runs
//! from the command line.
//!
//! Exit codes: 0 success, 1 validation or verification failure, 2 usage error.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "swkernel", version, about = "Stratonovich-Weyl kernels for N-level systems")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, env = "SWKERNEL_SEED", default_value_t = 42)]
    seed: u64,

    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a kernel from a named family or from spherical angles.
    Kernel {
        #[command(flatten)]
        spec: KernelSpec,
        /// Conjugate by a Haar unitary drawn from this seed.
        #[arg(long)]
        phase_seed: Option<u64>,
    },
    /// Grid of admissible moduli points with spectra and strata.
    ModuliGrid {
        #[arg(long)]
        dim: usize,
        /// Points per angle.
        #[arg(long, default_value_t = 11)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run the verification suite, or check a kernel file.
    Verify {
        /// Dimensions to check.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4])]
        dims: Vec<usize>,
        /// Monte-Carlo samples per check.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Random draws for the exact checks.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Only check the kernel stored in this JSON file.
        #[arg(long)]
        kernel: Option<PathBuf>,
    },
    /// Evaluate the Wigner function of a state.
    Wigner {
        /// Density matrix as JSON `{dim, re, im}`.
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        spec: KernelSpec,
        /// Kernel JSON file as written by `kernel`.
        #[arg(long, conflicts_with_all = ["family", "angles"])]
        kernel: Option<PathBuf>,
        /// Evaluate at a Haar phase point drawn from this seed.
        #[arg(long)]
        phase_seed: Option<u64>,
        /// Sample this many Haar phase points (drawn from `--seed`).
        #[arg(long)]
        sweep: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args, Debug, Clone)]
struct KernelSpec {
    /// Dimension N of the system.
    #[arg(long)]
    dim: Option<usize>,
    /// Family name, e.g. `qubit`, `qutrit`, `golden`, `regular`, `1|23|4`.
    #[arg(long)]
    family: Option<String>,
    /// Parameter of the one-parameter families.
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    /// First parameter of the regular quatrit family.
    #[arg(long, allow_negative_numbers = true)]
    nu1: Option<f64>,
    /// Second parameter of the regular quatrit family.
    #[arg(long, allow_negative_numbers = true)]
    nu2: Option<f64>,
    /// Comma-separated spherical angles ψ_1,...,ψ_{N-2}.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "family")]
    angles: Option<Vec<f64>>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

/// Failure with its exit code.
#[derive(Debug)]
enum Failure {
    Invalid(String),
    Usage(String),
}

impl From<swkernel::Error> for Failure {
    fn from(e: swkernel::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Kernel { spec, phase_seed } => commands::kernel(&spec, phase_seed),
        Command::ModuliGrid { dim, resolution, format } => commands::moduli_grid(dim, resolution, format),
        Command::Verify { dims, samples, trials, kernel } => {
            commands::verify(&dims, samples, trials, cli.seed, kernel.as_deref())
        }
        Command::Wigner { state, spec, kernel, phase_seed, sweep, format } => {
            commands::wigner(&state, &spec, kernel.as_deref(), phase_seed, sweep, cli.seed, format)
        }
    };
    let (text, code) = match result {
        Ok(out) => (out.text, if out.pass { 0 } else { 1 }),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = io::emit(cli.output.as_deref(), &text) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
