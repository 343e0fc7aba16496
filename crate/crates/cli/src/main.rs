mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exit statuses shared by every subcommand.
pub mod status {
    pub const OK: u8 = 0;
    pub const VERIFICATION: u8 = 1;
    pub const IO: u8 = 2;
    pub const INSUFFICIENT: u8 = 3;
    pub const USAGE: u8 = 64;
    pub const PARSE: u8 = 65;
}

#[derive(Debug, Parser)]
#[command(
    name = "povmquad",
    version,
    about = "Optimal finite qubit-estimation POVMs from sphere quadratures"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PovmFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Weights {
    /// Explicit if every line has a fourth column, else uniform
    Auto,
    Uniform,
    Explicit,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the product-rule POVM for N copies and verify it
    Construct {
        #[arg(value_parser = clap::value_parser!(u64).range(1..))]
        copies: u64,
        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = PovmFormat::Json)]
        format: PovmFormat,
    },
    /// Print per-degree harmonic residuals of a point-set file
    Certify {
        file: PathBuf,
        #[arg(long = "lmax", default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
        l_max: u64,
        #[arg(long, default_value_t = povmquad::quadrature::DEFAULT_TOLERANCE)]
        tol: f64,
        /// Fail (exit 1) when the detected strength is below this
        #[arg(long)]
        expect: Option<usize>,
        #[arg(long, value_enum, default_value_t = Weights::Auto)]
        weights: Weights,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Print only the detected strength of a point-set file
    Strength {
        file: PathBuf,
        #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
        #[arg(long, default_value_t = povmquad::quadrature::DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Weights::Auto)]
        weights: Weights,
    },
    /// Play the estimation game with a POVM file
    Simulate {
        povm: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Exact and quadrature-averaged score of a POVM file
    Score {
        povm: PathBuf,
        /// Point-set file; prints the conditional score at each direction
        #[arg(long)]
        directions: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Element counts per construction method
    Table {
        #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
        nmax: u64,
        /// Grid directory (defaults to $POVMQUAD_GRIDS)
        #[arg(long, env = "POVMQUAD_GRIDS")]
        grids: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                status::USAGE
            } else {
                status::OK
            });
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
