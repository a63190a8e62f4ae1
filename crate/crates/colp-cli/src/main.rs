//! Causal direction inference for categorical variable pairs.
//!
//! Subcommands: `fit` and `discover` work on CSV files; `simulate`,
//! `ablate`, and `sweep` run seeded benchmark studies; `bench` scores a
//! directory of labeled cause-effect pairs.
//!
//! Exit codes: 0 success (a tie verdict is success), 2 for input and
//! ingestion problems, 3 for fit or search failures.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use colp_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "colp",
    version,
    about = "Causal direction inference for categorical variable pairs via optimal-label-permutation classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the classifier (response ordering + ordinal regression) to a pair.
    Fit(commands::FitArgs),
    /// Decide the causal direction of a pair by likelihood comparison.
    Discover(commands::DiscoverArgs),
    /// Run a synthetic scenario across seeded replications.
    Simulate(commands::SimulateArgs),
    /// Measure accuracy with the forward ordering frozen at given taus.
    Ablate(commands::AblateArgs),
    /// Run the scenario across a range of category counts.
    Sweep(commands::SweepArgs),
    /// Score every labeled pair in a collection directory.
    Bench(commands::BenchArgs),
}

fn jobs_of(command: &Command) -> usize {
    match command {
        Command::Fit(a) => a.jobs,
        Command::Discover(a) => a.jobs,
        Command::Simulate(a) => a.jobs,
        Command::Ablate(a) => a.jobs,
        Command::Sweep(a) => a.jobs,
        Command::Bench(a) => a.jobs,
    }
}

fn run(command: &Command) -> Result<()> {
    match command {
        Command::Fit(args) => commands::fit(args),
        Command::Discover(args) => commands::discover(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Ablate(args) => commands::ablate(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Bench(args) => commands::bench(args),
    }
}

/// 2 for input/ingestion problems, 3 for fit/search failures.
fn exit_code(error: &Error) -> u8 {
    match error {
        Error::Io { .. }
        | Error::Csv { .. }
        | Error::MissingColumn(_)
        | Error::TooFewLevels { .. }
        | Error::NonNumericColumn { .. }
        | Error::EmptyInput(_)
        | Error::Manifest(_)
        | Error::EmptySample
        | Error::SampleLengthMismatch { .. }
        | Error::LabelCountMismatch { .. }
        | Error::LevelOutOfRange { .. }
        | Error::TooFewDistinctValues { .. }
        | Error::CollapsedQuantiles { .. }
        | Error::ColumnLooksContinuous { .. }
        | Error::DegenerateData(_)
        | Error::DimensionGate { .. }
        | Error::AllZeroCounts => 2,
        Error::ExhaustiveGateExceeded { .. }
        | Error::TooFewObservations { .. }
        | Error::CalibrationFailed(_)
        | Error::InvalidThresholds(_)
        | Error::NonFiniteParameter(_)
        | Error::InvalidPermutation(_)
        | Error::PermutationLengthMismatch { .. }
        | Error::InvalidConfig(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = jobs_of(&cli.command);
    let result = if jobs == 0 {
        run(&cli.command)
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| run(&cli.command)),
            Err(e) => {
                eprintln!("error: could not build a pool of {jobs} threads: {e}");
                return ExitCode::from(3);
            }
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            if matches!(error, Error::ExhaustiveGateExceeded { .. }) {
                eprintln!("hint: raise --max-exhaustive-levels or use --search greedy");
            }
            if matches!(error, Error::ColumnLooksContinuous { .. }) {
                eprintln!("hint: pass --discretize-x N or --discretize-y N");
            }
            ExitCode::from(exit_code(&error))
        }
    }
}
