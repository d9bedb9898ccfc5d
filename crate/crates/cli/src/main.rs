use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use deglab::verify::OutputFormat;
use deglab_cli::commands::{self, Suite};

/// Numerical laboratory for degree inequalities of circle-valued maps.
#[derive(Parser)]
#[command(name = "deglab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured sweep and write a CSV/JSON report.
    Scan {
        /// Path to the JSON scan configuration.
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the lemma checks and print a pass/fail summary.
    CheckLemmas {
        #[arg(long, value_enum, default_value_t = Suite::Standard)]
        suite: Suite,
    },
    /// Compare quadrature against every closed-form oracle.
    OracleSelftest {
        /// Grid size for the identity-map comparisons.
        #[arg(long, default_value_t = 2048)]
        n: usize,
    },
    /// Reformat an existing JSON report.
    Report {
        /// Path to a JSON report produced by `scan`.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        format: CliFormat,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum CliFormat {
    Csv,
    Json,
}

impl From<CliFormat> for OutputFormat {
    fn from(value: CliFormat) -> Self {
        match value {
            CliFormat::Csv => OutputFormat::Csv,
            CliFormat::Json => OutputFormat::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Scan { config } => commands::run_scan(&config),
        Command::CheckLemmas { suite } => commands::run_check_lemmas(suite),
        Command::OracleSelftest { n } => commands::run_oracle_selftest(n),
        Command::Report { input, format } => commands::run_report(&input, format.into()),
    };
    ExitCode::from(code as u8)
}
