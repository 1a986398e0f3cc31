//! `nrep`: check trial 2-densities against N-representability conditions
//! and reproduce the bound experiments from the command line.
//!
//! Exit codes: 0 pass, 1 usage or input error, 2 violation detected.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nrep::conditions::{ProbeSet, DEFAULT_TOL};

use crate::output::Format;

#[derive(Parser)]
#[command(name = "nrep", version, about = "N-representability condition checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every condition on a 2-density matrix file.
    Check {
        #[arg(long)]
        file: PathBuf,
        /// Particle number.
        #[arg(long = "N", default_value_t = 3)]
        particles: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// eigen, extreme, random:k, all or all:k.
        #[arg(long, default_value = "all")]
        probes: ProbeSet,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compare the closed-form spectrum of 3 P_g ∧ I with direct diagonalization.
    VerifySpectral {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print per-eigenvalue tables when count is at most this.
        #[arg(long, default_value_t = 3)]
        detail_limit: usize,
    },
    /// Tabulate dual-P, B/C and strengthened-B bounds for the extreme geminal.
    CompareBounds {
        #[arg(long, value_delimiter = ',', default_values_t = [4, 6, 8, 10, 12])]
        n: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Scan the interpolated family for B/C-feasible, dual-P-infeasible densities.
    Witness {
        #[arg(long)]
        n: usize,
        #[arg(long = "N", default_value_t = 3)]
        particles: usize,
        /// Comma-separated λ values; defaults to 0.05, 0.10, ..., 1.00.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Generate a 2-density and write it as a matrix file.
    Sample {
        /// pure_contracted, mixed_contracted, maximally_mixed, geminal_projector or interpolated.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long = "N", default_value_t = 3)]
        particles: usize,
        #[arg(long, default_value_t = 1)]
        mix_rank: usize,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// extreme or random; used by geminal_projector and interpolated.
        #[arg(long, default_value = "extreme")]
        geminal: String,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Check {
            file,
            particles,
            tol,
            probes,
            seed,
            format,
        } => commands::check(&file, particles, probes, tol, seed, format),
        Command::VerifySpectral {
            n,
            count,
            seed,
            detail_limit,
        } => commands::verify_spectral(n, count, seed, detail_limit),
        Command::CompareBounds { n, format } => commands::compare_bounds(&n, format),
        Command::Witness {
            n,
            particles,
            grid,
            format,
        } => commands::witness(n, particles, grid, format),
        Command::Sample {
            kind,
            n,
            particles,
            mix_rank,
            lambda,
            seed,
            geminal,
            out,
        } => commands::sample(
            &kind,
            &geminal,
            n,
            particles,
            mix_rank,
            lambda,
            seed,
            out.as_deref(),
        ),
    };
    match result {
        Ok(status) => ExitCode::from(status),
        Err(e) if is_broken_pipe(e.as_ref()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn is_broken_pipe(e: &(dyn std::error::Error + 'static)) -> bool {
    e.downcast_ref::<std::io::Error>()
        .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}
