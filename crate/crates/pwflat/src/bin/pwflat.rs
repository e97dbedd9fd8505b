//! Command-line interface over the pwflat library.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation failure,
//! 3 non-convergence. Set PWFLAT_THREADS to bound the thread pool used
//! for parallel assembly.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pwflat::cli;

#[derive(Parser)]
#[command(
    name = "pwflat",
    about = "Curvature, conformal variations, and prescribed-curvature solvers \
             on piecewise flat 2- and 3-manifolds",
    version
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a mesh file: manifold, metric, and chart-domain reports.
    Check { path: PathBuf },
    /// Curvatures, total curvature, volume, and residual reports.
    Curvature {
        path: PathBuf,
        /// Output format: json or csv.
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Analytic-vs-finite-difference validation of the variation formulas.
    JacobianTest {
        path: PathBuf,
        /// Number of random in-domain perturbations of f.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Random seed.
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Solve a prescribed-curvature problem inside the file's chart.
    Solve {
        path: PathBuf,
        /// Target: flat, csc, or file (with --target-file).
        #[arg(long, default_value = "flat")]
        target: String,
        /// Per-vertex curvature targets ('K <vertex> <value>' lines).
        #[arg(long)]
        target_file: Option<PathBuf>,
        /// Method: newton or flow.
        #[arg(long, default_value = "newton")]
        method: String,
        /// Gauge: zero-mean or pin:<vertex>.
        #[arg(long, default_value = "zero-mean")]
        gauge: String,
        /// Iteration cap (Newton steps or flow steps).
        #[arg(long)]
        max_iterations: Option<usize>,
        /// Output mesh path; the trace CSV lands next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Laplacian spectrum and definiteness flags.
    Spectrum {
        path: PathBuf,
        /// Output format: json or csv.
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Print one of the bundled example meshes.
    Example { name: String },
    /// Convert a triangular OFF file to the mesh format.
    ImportOff {
        path: PathBuf,
        /// Output mesh path.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("PWFLAT_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build_global();
        }
    }

    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => cli::EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };

    let outcome = match &args.command {
        Command::Check { path } => cli::cmd_check(path),
        Command::Curvature { path, format } => cli::cmd_curvature(path, format),
        Command::JacobianTest { path, trials, seed } => {
            cli::cmd_jacobian_test(path, *trials, *seed)
        }
        Command::Solve {
            path,
            target,
            target_file,
            method,
            gauge,
            max_iterations,
            out,
        } => cli::cmd_solve(
            path,
            target,
            target_file.as_deref(),
            method,
            gauge,
            *max_iterations,
            out,
        ),
        Command::Spectrum { path, format } => cli::cmd_spectrum(path, format),
        Command::Example { name } => cli::cmd_example(name),
        Command::ImportOff { path, out } => cli::cmd_import_off(path, out),
    };

    if outcome.stdout.ends_with('\n') {
        print!("{}", outcome.stdout);
    } else {
        println!("{}", outcome.stdout);
    }
    ExitCode::from(outcome.exit_code as u8)
}
