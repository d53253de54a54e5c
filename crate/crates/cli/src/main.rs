use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use hurwitz_core::asymptotics::m0_bound;
use hurwitz_core::extremal::{el_residuals, minimize_trace, ExtremalCandidate};
use hurwitz_core::hurwitz::{quotient_sequence, TraceRecord};
use hurwitz_core::matrix::HermitianMatrix;
use hurwitz_core::sampling::Ensemble;
use hurwitz_core::scan::{scan_conjecture, OutputFormat, ScanConfig, DEFAULT_TOLERANCE};
use hurwitz_core::verify::{run_verification_suite, Level};
use hurwitz_core::{Error, Result};

/// Hurwitz product traces of positive hermitian matrices.
#[derive(Parser)]
#[command(name = "hurwitz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// tr S_{m,k}(A,B) and its normalized quotient.
    Trace {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: u64,
    },
    /// q_{m,k} for m = k, …, k + count - 1.
    Quotient {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        count: u64,
    },
    /// Explicit threshold past which tr S_{m,k}(A,B) > 0.
    M0 {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        k: u64,
    },
    /// Monotonicity scan of m ↦ q_{m+k,k} over random pairs.
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<u64>,
        #[arg(long)]
        m_count: u64,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "complex-wishart")]
        ensemble: Ensemble,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "jsonl")]
        format: OutputFormat,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tolerance: f64,
    },
    /// Stationarity residuals at a unit p-norm pair.
    ElCheck {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        p: f64,
    },
    /// Projected descent on tr S_{m,k} over unit p-norm pairs.
    ElSearch {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_iters: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Evaluates every built-in invariant.
    Verify {
        #[arg(long, default_value = "quick")]
        level: Level,
    },
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    writeln!(io::stdout(), "{}", serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn read_pair(a: &PathBuf, b: &PathBuf) -> Result<(HermitianMatrix, HermitianMatrix)> {
    Ok((HermitianMatrix::read_json(a)?, HermitianMatrix::read_json(b)?))
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Trace { a, b, m, k } => {
            let (a, b) = read_pair(&a, &b)?;
            print_json(&TraceRecord::compute(&a, &b, m, k)?)?;
        }
        Command::Quotient { a, b, k, count } => {
            let (a, b) = read_pair(&a, &b)?;
            print_json(&quotient_sequence(&a, &b, k, count)?)?;
        }
        Command::M0 { a, b, k } => {
            let (a, b) = read_pair(&a, &b)?;
            print_json(&m0_bound(&a, &b, k)?)?;
        }
        Command::Scan { n, k_list, m_count, samples, seed, ensemble, out, format, tolerance } => {
            let config = ScanConfig { n, k_list, m_count, samples, master_seed: seed, ensemble, tolerance, output_path: out, format };
            print_json(&scan_conjecture(&config)?)?;
        }
        Command::ElCheck { a, b, m, k, p } => {
            let (a, b) = read_pair(&a, &b)?;
            let candidate = ExtremalCandidate::new(a, b, p, m, k)?;
            print_json(&el_residuals(&candidate)?)?;
        }
        Command::ElSearch { n, m, k, p, seed, max_iters, tol } => {
            print_json(&minimize_trace(n, m, k, p, seed, max_iters, tol)?)?;
        }
        Command::Verify { level } => {
            let report = run_verification_suite(level);
            writeln!(io::stdout(), "{report}")?;
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> ExitCode {
    ExitCode::from(e.exit_code() as u8)
}
