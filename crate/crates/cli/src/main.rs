//! `qdisc`: solve, verify and cross-check quantum state discrimination
//! problems described in JSON files.
//!
//! Exit codes: 0 success, 1 input error, 2 solver did not converge (partial
//! output is still written), 3 verification failed.

mod schema;
mod solve;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qdisc::brute_force_minimax;

use schema::{read_json, to_json, ProblemFile, SolutionFile};
use solve::{Outcome, Partial};

const EXIT_INPUT: u8 = 1;
const EXIT_CONVERGENCE: u8 = 2;
const EXIT_VERIFY: u8 = 3;

const DEFAULT_SAMPLES: usize = 10_000;
const DEFAULT_ORACLE_GRID: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Structured,
}

#[derive(Parser)]
#[command(name = "qdisc", version, about = "Optimal discrimination of quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a problem file and print the solution document.
    Solve {
        problem: PathBuf,
        /// Duality gap tolerance (overrides the file).
        #[arg(long)]
        tol: Option<f64>,
        /// Step of the prior grid for minimax problems (overrides the file).
        #[arg(long)]
        grid_step: Option<f64>,
        /// Attach a sampling-oracle sandwich with this many random POVMs.
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Output::Structured)]
        output: Output,
    },
    /// Re-check a solution document against its problem file.
    Verify {
        solution: PathBuf,
        problem: PathBuf,
        #[arg(long, value_enum, default_value_t = Output::Text)]
        output: Output,
    },
    /// Brute-force bounds from random POVMs and a prior grid.
    Oracle {
        problem: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_ORACLE_GRID)]
        grid_step: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Output::Structured)]
        output: Output,
    },
}

fn load_problem(path: &Path, tol: Option<f64>, grid_step: Option<f64>) -> Result<schema::Problem> {
    let file: ProblemFile = read_json(path)?;
    let mut tolerances = file.tolerances();
    if let Some(t) = tol {
        tolerances.gap_tol = t;
    }
    if let Some(h) = grid_step {
        tolerances.simplex_grid_step = Some(h);
    }
    file.to_problem(tolerances)
        .with_context(|| format!("invalid problem {}", path.display()))
}

fn emit_solution(sol: &SolutionFile, output: Output) {
    match output {
        Output::Structured => println!("{}", to_json(sol)),
        Output::Text => print!("{}", solve::render_text(sol)),
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            problem,
            tol,
            grid_step,
            samples,
            seed,
            output,
        } => {
            let loaded = load_problem(&problem, tol, grid_step)?;
            let request = solve::OracleRequest {
                samples,
                seed,
                grid_step: grid_step.unwrap_or(DEFAULT_ORACLE_GRID),
            };
            match solve::solve(&loaded, Some(&request))? {
                Outcome::Solved(sol) => {
                    emit_solution(&sol, output);
                    Ok(0)
                }
                Outcome::Unconverged(Partial(sol, reason)) => {
                    emit_solution(&sol, output);
                    eprintln!("{}", error_line("convergence", &reason));
                    Ok(EXIT_CONVERGENCE)
                }
            }
        }
        Command::Verify {
            solution,
            problem,
            output,
        } => {
            let sol: SolutionFile = read_json(&solution)?;
            let loaded = load_problem(&problem, None, None)?;
            let report = verify::verify(&sol, &loaded)?;
            match output {
                Output::Structured => println!("{}", to_json(&report)),
                Output::Text => print!("{}", verify::render_text(&report)),
            }
            Ok(if report.passed { 0 } else { EXIT_VERIFY })
        }
        Command::Oracle {
            problem,
            samples,
            grid_step,
            seed,
            output,
        } => {
            let loaded = load_problem(&problem, None, None)?;
            let target = solve::discrimination_problem(&loaded)
                .context("the oracle needs a bayes, minimax or covariant problem")?;
            let report = brute_force_minimax(target, samples, grid_step, seed, &[])?;
            let doc = solve::oracle_doc(&report, grid_step, true);
            match output {
                Output::Structured => println!("{}", to_json(&doc)),
                Output::Text => println!(
                    "oracle sandwich: [{:.10}, {:.10}] width {:.3e} ({} samples, seed {})",
                    doc.dual_bound, doc.primal_bound, doc.sandwich_width, doc.samples, doc.seed
                ),
            }
            Ok(0)
        }
    }
}

/// One-line JSON diagnostic for standard error.
fn error_line(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", error_line("input", &format!("{e:#}")));
            ExitCode::from(EXIT_INPUT)
        }
    }
}
