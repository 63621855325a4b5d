use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cohmm_cli::commands::{check_cmd, decompose_cmd, reduce_cmd, sample_cmd, validate_cmd, Outcome, ReduceMethod};
use cohmm_cli::{CliError, ModelFile, SEED_ENV};

/// Trace equivalence for hidden Markov models with continuous observations.
#[derive(Parser)]
#[command(name = "cohmm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report validation errors and non-negativity warnings.
    Validate { file: String },
    /// Decide whether two initial distributions are trace equivalent.
    ///
    /// A distribution is a name from the file's `distributions` table or a
    /// state name, meaning the point mass on that state.
    Check {
        file: String,
        dist1: String,
        dist2: String,
        /// Skip the labelling shortcut and always decompose.
        #[arg(long)]
        no_fast_path: bool,
        /// Print a single-line JSON verdict.
        #[arg(long)]
        json: bool,
    },
    /// Print the finite-observation reduction in the model file format.
    Reduce {
        file: String,
        #[arg(long, value_enum, default_value_t = ReduceMethod::Auto)]
        method: ReduceMethod,
    },
    /// Print the basis profiles, coefficients and matrices of the
    /// functional decomposition.
    Decompose { file: String },
    /// Print sampled traces, one per line.
    Sample {
        file: String,
        dist: String,
        /// Trace length.
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Validate { file } => Ok(validate_cmd(&ModelFile::read(&file)?)),
        Command::Check {
            file,
            dist1,
            dist2,
            no_fast_path,
            json,
        } => check_cmd(&ModelFile::read(&file)?, &dist1, &dist2, !no_fast_path, json),
        Command::Reduce { file, method } => reduce_cmd(&ModelFile::read(&file)?, method),
        Command::Decompose { file } => decompose_cmd(&ModelFile::read(&file)?),
        Command::Sample {
            file,
            dist,
            n,
            count,
            seed,
        } => sample_cmd(&ModelFile::read(&file)?, &dist, n, count, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not worth a panic.
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
