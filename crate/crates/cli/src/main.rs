use std::path::PathBuf;
use std::process::ExitCode;

use bilevel_knapsack::rational::parse_rational;
use bkp_cli::record::to_json;
use bkp_cli::schema::{self, Generator, TieSpec};
use bkp_cli::{eval, export_pwl, gen, load_path, solve, CliError, CliResult, GenRequest, Options};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bkp", version, about = "Exact solvers for the bilevel continuous knapsack problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Largest number of scenarios an expansion may enumerate
    #[arg(long, global = true, default_value_t = 1 << 20)]
    model_budget: u64,

    /// Also run a brute-force reference solver and compare
    #[arg(long, global = true)]
    oracle: bool,

    /// Override the tie policy of the instance
    #[arg(long, global = true, value_enum)]
    tie: Option<TieSpec>,

    /// Seed for Monte Carlo sampling
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Number of Monte Carlo samples
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: u64,

    /// Bits of precision for p-th roots in generated p-norm gadgets
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal capacity and value of an instance
    Solve { instance: PathBuf },
    /// Leader's value at one capacity, with a worst case
    Eval {
        instance: PathBuf,
        /// Capacity, e.g. 3/2
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Write a gadget instance built from subset-sum or counting data
    Gen {
        #[arg(value_enum)]
        kind: Generator,
        /// Subset-sum weights, comma separated
        #[arg(long, value_delimiter = ',')]
        w: Vec<u64>,
        /// Subset-sum target W
        #[arg(long)]
        target: Option<u64>,
        /// Norm exponent for pnorm
        #[arg(long, default_value = "1")]
        p: String,
        /// Lower the last base profit infinitesimally (simplex, optimistic)
        #[arg(long)]
        optimistic_adjusted: bool,
        /// Counting weights a*, comma separated
        #[arg(long, value_delimiter = ',')]
        a_star: Vec<u64>,
        /// Counting bound b*
        #[arg(long)]
        b_star: Option<u64>,
        /// Slope shift of the counting gadget
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        tau: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Breakpoints of the leader's objective as CSV
    ExportPwl {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn rational_arg(name: &str, s: &str) -> CliResult<bilevel_knapsack::Rational> {
    parse_rational(s).map_err(|e| CliError::input(format!("--{name}: {e}")))
}

fn emit(output: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let opts = Options {
        model_budget: cli.model_budget,
        oracle: cli.oracle,
        tie: cli.tie,
        seed: cli.seed,
        samples: cli.samples,
        precision_bits: cli.precision_bits,
    };
    match cli.command {
        Command::Solve { instance } => emit(None, &to_json(&solve(&load_path(&instance)?, &opts)?)),
        Command::Eval { instance, b } => {
            let b = parse_rational(&b).map_err(|e| CliError::input(format!("capacity: {e}")))?;
            emit(None, &to_json(&eval(&load_path(&instance)?, &b, &opts)?))
        }
        Command::ExportPwl { instance, output } => emit(output.as_ref(), &export_pwl(&load_path(&instance)?, &opts)?),
        Command::Gen {
            kind,
            w,
            target,
            p,
            optimistic_adjusted,
            a_star,
            b_star,
            tau,
            output,
        } => {
            let req = match kind {
                Generator::Stochastic | Generator::StochasticContinuous => GenRequest::Counting {
                    continuous: kind == Generator::StochasticContinuous,
                    a_star,
                    b_star: b_star.ok_or_else(|| CliError::input("--b-star is required"))?,
                    tau: rational_arg("tau", &tau)?,
                },
                _ => GenRequest::SubsetSum {
                    generator: kind,
                    w,
                    target: target.ok_or_else(|| CliError::input("--target is required"))?,
                    p: rational_arg("p", &p)?,
                    optimistic_adjusted,
                },
            };
            emit(output.as_ref(), &schema::to_json(&gen(&req, &opts)?))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
