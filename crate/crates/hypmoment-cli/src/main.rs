//! Command-line driver for moment-sequence decision and measure
//! construction on reducible cubics of hyperbolic type.
//!
//! Exit codes: 0 = success / YES, 1 = NO (no representing measure or
//! failed verification), 2 = invalid input, 3 = tolerance not met.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod instance;

#[derive(Parser)]
#[command(
    name = "hypmoment",
    version,
    about = "Decide, construct, and check representing measures for bivariate \
             truncated moment sequences on reducible cubics of hyperbolic type"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether an instance admits a representing measure on its curve
    Decide {
        /// Instance file (JSON)
        path: PathBuf,
        /// Working precision in bits for printed witness values
        #[arg(long, default_value_t = 256)]
        precision: u64,
        /// Also write the report to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct a minimal representing measure and check its residual
    Solve {
        /// Instance file (JSON)
        path: PathBuf,
        /// Working precision in bits
        #[arg(long, default_value_t = 256)]
        precision: u64,
        /// Maximum allowed relative moment residual
        #[arg(long, default_value = "1e-25")]
        tol: String,
        /// Also write the report to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a measure file against an instance's moments
    Verify {
        /// Instance file (JSON)
        path: PathBuf,
        /// Measure file (JSON)
        measure: PathBuf,
        /// Maximum allowed relative moment deviation
        #[arg(long, default_value = "1e-25")]
        tol: String,
    },
    /// Sample a random atomic measure on a curve and write its instance
    Generate {
        /// Curve family: hyp1, hyp2, or hyp3
        curve: String,
        /// Curve coefficient for hyp2/hyp3 (drawn from the seed when omitted)
        #[arg(long)]
        a: Option<String>,
        /// Number of atoms on the line component y = 0
        #[arg(long, default_value_t = 1)]
        n_line: usize,
        /// Number of atoms on the conic component
        #[arg(long, default_value_t = 2)]
        n_conic: usize,
        /// Half-degree of the generated sequence
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// RNG seed; equal seeds produce byte-identical output
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Height bound on atom coordinates
        #[arg(long, default_value_t = 20)]
        height: i64,
        /// Instance file to write; the measure file lands next to it
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply an invertible affine change of variables to the moments
    Transform {
        /// Instance file (JSON)
        path: PathBuf,
        /// Constant term of x' = a + b·x + c·y
        #[arg(allow_hyphen_values = true)]
        a: String,
        /// Coefficient of x in x'
        #[arg(allow_hyphen_values = true)]
        b: String,
        /// Coefficient of y in x'
        #[arg(allow_hyphen_values = true)]
        c: String,
        /// Constant term of y' = d + e·x + f·y
        #[arg(allow_hyphen_values = true)]
        d: String,
        /// Coefficient of x in y'
        #[arg(allow_hyphen_values = true)]
        e: String,
        /// Coefficient of y in y'
        #[arg(allow_hyphen_values = true)]
        f: String,
        /// File to write the transformed instance to
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Decide { path, precision, out } => commands::decide(&path, precision, out.as_deref()),
        Cmd::Solve { path, precision, tol, out } => {
            commands::solve(&path, precision, &tol, out.as_deref())
        }
        Cmd::Verify { path, measure, tol } => commands::verify(&path, &measure, &tol),
        Cmd::Generate { curve, a, n_line, n_conic, k, seed, height, out } => commands::generate(
            &curve,
            a.as_deref(),
            n_line,
            n_conic,
            k,
            seed,
            height,
            out.as_deref(),
        ),
        Cmd::Transform { path, a, b, c, d, e, f, out } => {
            commands::transform(&path, &[a, b, c, d, e, f], out.as_deref())
        }
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.exit)
        }
        Err(message) => {
            eprintln!("{}", serde_json::json!({ "error": message }));
            ExitCode::from(2)
        }
    }
}
