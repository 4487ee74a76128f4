//! Command-line front end: `solve`, `verify`, `gen` and `bench`.
//!
//! Exit codes: 0 success, 2 bad input or arguments, 3 solver failure,
//! 4 guarantee or certificate violated, 5 oracle budget exceeded.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use ukp_core::bench::{render_csv, run_bench, BenchConfig};
use ukp_core::generate::{generate_instance, Profile};
use ukp_core::io::{parse_instance, render_instance, render_machine, render_text};
use ukp_core::oracle::{brute_force_within, exact_dp, GridInstance, BRUTE_BUDGET, DP_BUDGET};
use ukp_core::{solve, Error, Instance, Rational, SolveResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;
pub const EXIT_BUDGET: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "ukp", version, about = "Approximate unbounded knapsack solver with exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve an instance file
    Solve {
        /// Instance file, or `-` for standard input
        #[arg(long)]
        input: PathBuf,
        /// Accuracy, e.g. `1/8` or `0.1`
        #[arg(long)]
        eps: Rational,
        #[arg(long, value_enum, default_value_t = Emit::Text)]
        emit: Emit,
    },
    /// Solve and compare against an exact oracle
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        eps: Rational,
        #[arg(long, value_enum, default_value_t = OracleKind::Dp)]
        oracle: OracleKind,
        /// Oracle budget: table cells for `dp`, search nodes for `brute`
        #[arg(long)]
        budget: Option<u128>,
        /// Corrupt the solver result before checking it
        #[arg(long, hide = true)]
        tamper: bool,
    },
    /// Generate a random instance
    Gen {
        #[arg(long)]
        n: usize,
        /// Size grid denominator
        #[arg(long, short = 'd', default_value_t = 64)]
        denominator: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "uniform", value_parser = parse_profile)]
        profile: Profile,
        /// Output file; standard output when absent
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve generated instances and write a CSV of counters and timings
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1/4,1/8")]
        eps_list: Vec<Rational>,
        /// Item counts
        #[arg(long, value_delimiter = ',', default_value = "20")]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        seeds: Vec<u64>,
        #[arg(long, short = 'd', default_value_t = 64)]
        denominator: u64,
        #[arg(long, default_value = "uniform", value_parser = parse_profile)]
        profile: Profile,
        /// Skip the exact optimum column
        #[arg(long)]
        no_oracle: bool,
        /// Output file; standard output when absent
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Machine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    Dp,
    Brute,
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn write_out(out: &mut dyn Write, text: &str) -> Outcome {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::new(EXIT_SOLVER, format!("cannot write output: {e}")))
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let text = if path == Path::new("-") {
        let mut buf = String::new();
        io::stdin().read_to_string(&mut buf).map(|_| buf)
    } else {
        fs::read_to_string(path)
    };
    text.map_err(|e| Failure::new(EXIT_INPUT, format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read_input(path)?)
        .map_err(|e| Failure::new(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn check_eps(eps: &Rational) -> Outcome {
    if eps.is_zero() || *eps >= Rational::one() {
        return Err(Failure::new(
            EXIT_INPUT,
            format!("invalid epsilon {eps}: must lie in (0, 1)"),
        ));
    }
    Ok(())
}

fn run_solve(instance: &Instance, eps: &Rational) -> Result<SolveResult, Failure> {
    solve(instance, eps).map_err(|e| Failure::new(EXIT_SOLVER, format!("solver failed: {e}")))
}

fn oracle_failure(e: Error) -> Failure {
    match e {
        Error::OracleTooLarge { .. } => Failure::new(EXIT_BUDGET, e.to_string()),
        other => Failure::new(EXIT_SOLVER, format!("oracle failed: {other}")),
    }
}

fn cmd_verify(
    out: &mut dyn Write,
    instance: &Instance,
    eps: &Rational,
    oracle: OracleKind,
    budget: Option<u128>,
    tamper: bool,
) -> Outcome {
    let mut result = run_solve(instance, eps)?;
    if tamper {
        // Claim one more unit of profit than the certificate carries.
        result.profit = &result.profit + &Rational::one();
    }
    let opt = match oracle {
        OracleKind::Dp => {
            let grid = GridInstance::from_instance(instance).map_err(oracle_failure)?;
            exact_dp(&grid, budget.unwrap_or(DP_BUDGET)).map_err(oracle_failure)?.0
        }
        OracleKind::Brute => brute_force_within(
            instance.items(),
            &Rational::one(),
            u64::MAX,
            budget.unwrap_or(BRUTE_BUDGET),
        )
        .map_err(oracle_failure)?,
    };
    let bound = (Rational::one() - &result.params.eps) * opt.clone();
    let ratio = if opt.is_zero() {
        Rational::one()
    } else {
        &result.profit / &opt
    };
    write_out(
        out,
        &format!(
            "profit {}\noptimum {}\nratio {} ({:.6})\nbound {}\n",
            result.profit,
            opt,
            ratio,
            ratio.to_f64(),
            bound
        ),
    )?;
    if let Err(e) = result.solution.verify(instance) {
        return Err(Failure::new(EXIT_VIOLATION, format!("certificate rejected: {e}")));
    }
    if result.profit != *result.solution.total_profit() {
        return Err(Failure::new(
            EXIT_VIOLATION,
            format!(
                "reported profit {} differs from certificate total {}",
                result.profit,
                result.solution.total_profit()
            ),
        ));
    }
    if result.profit < bound || result.profit > opt {
        return Err(Failure::new(
            EXIT_VIOLATION,
            format!("profit {} outside [{bound}, {opt}]", result.profit),
        ));
    }
    Ok(())
}

fn write_file_or_out(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Outcome {
    match path {
        None => write_out(out, text),
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::new(EXIT_INPUT, format!("cannot write {}: {e}", path.display()))),
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Outcome {
    match cli.command {
        Command::Solve { input, eps, emit } => {
            check_eps(&eps)?;
            let instance = load(&input)?;
            let result = run_solve(&instance, &eps)?;
            let text = match emit {
                Emit::Text => render_text(&result, &instance),
                Emit::Machine => render_machine(&result),
            };
            write_out(out, &text)
        }
        Command::Verify {
            input,
            eps,
            oracle,
            budget,
            tamper,
        } => {
            check_eps(&eps)?;
            let instance = load(&input)?;
            cmd_verify(out, &instance, &eps, oracle, budget, tamper)
        }
        Command::Gen {
            n,
            denominator,
            seed,
            profile,
            output,
        } => {
            let instance = generate_instance(n, denominator, seed, profile)
                .map_err(|e| Failure::new(EXIT_INPUT, e.to_string()))?;
            write_file_or_out(out, output.as_deref(), &render_instance(&instance))
        }
        Command::Bench {
            eps_list,
            sizes,
            seeds,
            denominator,
            profile,
            no_oracle,
            csv,
        } => {
            for eps in &eps_list {
                check_eps(eps)?;
            }
            let config = BenchConfig {
                eps_list,
                sizes,
                seeds,
                denominator,
                profile,
                oracle_budget: if no_oracle { 0 } else { DP_BUDGET },
            };
            let records = run_bench(&config).map_err(|e| match e {
                Error::InvalidParameter(_) => Failure::new(EXIT_INPUT, e.to_string()),
                other => Failure::new(EXIT_SOLVER, other.to_string()),
            })?;
            write_file_or_out(out, csv.as_deref(), &render_csv(&records))
        }
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if code == 0 { EXIT_OK } else { EXIT_INPUT };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}
