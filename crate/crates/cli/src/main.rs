mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::code;

/// Compile RAM programs to process terms, explore their behaviour, and
/// measure and check what they compute.
#[derive(Parser, Debug)]
#[command(name = "ramproc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the process term of one or more programs.
    Compile {
        #[arg(long, value_enum, default_value_t = Model::Ramp)]
        model: Model,
        /// Read a RAMP term and print its program instead.
        #[arg(long)]
        inverse: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Explore a process under an initial valuation and report how it ends.
    Run {
        #[command(flatten)]
        input: Input,
        /// Run a single program with the direct interpreter for at most N
        /// instructions instead of exploring its transition system.
        #[arg(long, value_name = "N")]
        fuel: Option<u64>,
        /// Write the transition system to PATH.
        #[arg(long, value_name = "PATH")]
        lts: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Evaluate a complexity measure and print it as JSON.
    Measure {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_name = "NAME")]
        measure: String,
    },
    /// Check that a process computes the function given by an oracle
    /// command, optionally within a step or measure bound.
    Check {
        #[command(flatten)]
        input: Input,
        /// Shell command reading one argument word per line on stdin and
        /// printing the result word, or `undef`.
        #[arg(long, value_name = "CMD")]
        oracle: String,
        #[arg(long, default_value_t = 2)]
        arity: usize,
        /// Check every argument tuple with words of at most this length.
        #[arg(long, value_name = "L", conflicts_with = "inputs")]
        max_len: Option<usize>,
        /// Check the argument tuples listed in PATH, one comma-separated
        /// tuple per line.
        #[arg(long, value_name = "PATH")]
        inputs: Option<PathBuf>,
        /// Affine bound `a*n+b` on the number of steps, or on the measure
        /// when `--measure` is given.
        #[arg(long, value_name = "EXPR")]
        bound: Option<String>,
        #[arg(long, value_name = "NAME")]
        measure: Option<String>,
    },
}

/// What the input files are and how the initial valuation is built.
#[derive(Args, Debug)]
struct Input {
    #[arg(long, value_enum, default_value_t = Model::Ramp)]
    model: Model,
    /// Initial memory of flexible variable K, read from FILE.
    #[arg(long = "mem", value_name = "K=FILE")]
    mems: Vec<String>,
    /// Argument words placed in registers 1, 2, ... of `RM`.
    #[arg(long, value_name = "W1,W2,...")]
    args: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    max_states: usize,
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    /// A process term in canonical syntax.
    Term,
    /// One BBRAM program.
    Ramp,
    /// SMBRAM programs run asynchronously.
    Apramp,
    /// SMBRAM programs run in lock step.
    Spramp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { code::USAGE } else { code::OK });
        }
    };
    match commands::dispatch(cli.command) {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("ramproc: {e}");
            ExitCode::from(e.code())
        }
    }
}
