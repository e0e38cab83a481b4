//! Command-line front end: threshold reports, file-based matrix
//! operations, an instrumented benchmark harness emitting CSV, and a
//! timing-based search for the recursion switch order.
//!
//! Exit codes: 0 success, 1 usage error, 2 file/parse error,
//! 3 mathematical error (singular input and friends).

mod bench;
mod ops;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use zpla::bounds::{k_winograd, thresholds};
use zpla::{Error, Repr};

#[derive(Parser)]
#[command(name = "zpla", version, about = "Exact dense linear algebra over Z/pZ")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the delayed-reduction thresholds for a field, key=value per line
    Bounds {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value = "positive")]
        repr: String,
        #[arg(long, default_value_t = 53)]
        gamma: u32,
    },
    /// Run one operation on matrix files
    Op {
        /// mul | trsm | lqup | rank | det | inv | nullspace | pinv | ldlt
        operation: String,
        /// input file(s); two for mul and trsm, one otherwise
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "positive")]
        repr: String,
        #[arg(long, default_value_t = 53)]
        gamma: u32,
        /// auto or an explicit recursion depth
        #[arg(long, default_value = "auto")]
        levels: String,
        /// off | opcount | trace (report goes to stderr)
        #[arg(long, default_value = "off")]
        instrument: String,
        /// solver strategy for trsm: pure-recursive | delayed-base | double-cascade
        #[arg(long, default_value = "double-cascade")]
        variant: String,
    },
    /// Benchmark operations over a size list, CSV on stdout
    Bench {
        operation: String,
        /// comma-separated matrix orders, e.g. 64,128,256
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 65521)]
        p: u64,
        #[arg(long, default_value = "positive")]
        repr: String,
        #[arg(long, default_value_t = 53)]
        gamma: u32,
        #[arg(long, default_value = "auto")]
        levels: String,
        /// wall time is the minimum over this many repetitions
        #[arg(long, default_value_t = 3)]
        reps: u32,
        /// seed for the deterministic input generator
        #[arg(long, default_value_t = 24403)]
        seed: u64,
        /// run independent size cells on separate threads
        #[arg(long)]
        parallel: bool,
    },
    /// Search the matrix order where one recursive level breaks even
    Tune {
        #[arg(long, default_value_t = 65521)]
        p: u64,
        #[arg(long, default_value = "positive")]
        repr: String,
        #[arg(long, default_value_t = 53)]
        gamma: u32,
        /// largest order probed (also the order the level formula reports on)
        #[arg(long, default_value_t = 1024)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        reps: u32,
        #[arg(long, default_value_t = 24403)]
        seed: u64,
    },
}

fn parse_repr(s: &str) -> Result<Repr, String> {
    s.parse::<Repr>()
}

/// Exit-code classification of library errors.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::BadHeader(_)
        | Error::BadNumber(_)
        | Error::WrongEntryCount { .. }
        | Error::NotPrime(_)
        | Error::PrimeTooLarge { .. }
        | Error::BalancedEven
        | Error::NoValidLambda { .. } => 2,
        Error::LevelTooDeep { .. } => 1,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // keep help/version on stdout with success, everything else is usage
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

pub enum CliError {
    Usage(String),
    Io(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Bounds { p, repr, gamma } => {
            let repr = parse_repr(&repr).map_err(CliError::Usage)?;
            if !zpla::field::is_prime(p) {
                return Err(CliError::Lib(Error::NotPrime(p)));
            }
            let th = thresholds(p, gamma, repr)?;
            println!("lambda={}", th.lambda);
            println!("t_del={}", th.t_del);
            println!("t_update={}", th.t_update);
            println!("t_split={}", th.t_split);
            for l in 1..=5u32 {
                match k_winograd(p, gamma, l, repr) {
                    Ok(k) => println!("k_winograd_l{l}={k}"),
                    Err(_) => println!("k_winograd_l{l}=inadmissible"),
                }
            }
            Ok(())
        }
        Cmd::Op {
            operation,
            inputs,
            out,
            repr,
            gamma,
            levels,
            instrument,
            variant,
        } => {
            let repr = parse_repr(&repr).map_err(CliError::Usage)?;
            ops::run_op(
                &operation, &inputs, out.as_deref(), repr, gamma, &levels, &instrument, &variant,
            )
        }
        Cmd::Bench {
            operation,
            sizes,
            p,
            repr,
            gamma,
            levels,
            reps,
            seed,
            parallel,
        } => {
            let repr = parse_repr(&repr).map_err(CliError::Usage)?;
            let sizes: Vec<usize> = sizes
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("bad size list {sizes:?}")))?;
            if sizes.iter().any(|&s| s == 0) {
                return Err(CliError::Usage("sizes must be at least 1".into()));
            }
            bench::run_bench(&operation, &sizes, p, repr, gamma, &levels, reps, seed, parallel)
        }
        Cmd::Tune {
            p,
            repr,
            gamma,
            size,
            reps,
            seed,
        } => {
            let repr = parse_repr(&repr).map_err(CliError::Usage)?;
            bench::run_tune(p, repr, gamma, size, reps, seed)
        }
    }
}

pub fn parse_levels(s: &str) -> Result<zpla::Levels, CliError> {
    if s == "auto" {
        Ok(zpla::Levels::Auto)
    } else {
        s.parse::<u32>()
            .map(zpla::Levels::Exact)
            .map_err(|_| CliError::Usage(format!("--levels takes 'auto' or a number, got {s:?}")))
    }
}
