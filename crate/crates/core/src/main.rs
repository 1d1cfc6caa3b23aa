use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use archsw::cli::{
    parse_b_grid, run_eval, run_sweep, run_verify, write_sweep_csv, EvalFailure, EvalFn, EvalParams, HMode,
    MethodArg, Suite, VerifyConfig,
};
use archsw::combinatorial::NegativeTuple;
use archsw::Execution;

/// Verification harness for the Archimedean local Siegel–Weil identities.
///
/// Thread count follows RAYON_NUM_THREADS (default: all cores).
#[derive(Debug, Parser)]
#[command(name = "archsw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite and print a JSON report.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        /// Multiplies every numeric tolerance.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest tuple length in the randomized exact checks.
        #[arg(long, default_value_t = 6)]
        m_max: usize,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate d/ds W*_T + Ei(b) as b -> 0- and write CSV.
    Sweep {
        /// Comma-separated negative rationals, e.g. -1,-1/2.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Comma-separated list or start:factor:count.
        #[arg(long, allow_hyphen_values = true, default_value = "-1e-1:0.1:4")]
        b: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a single function and print a JSON object.
    Eval {
        #[arg(value_enum)]
        function: EvalFn,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long = "T", allow_hyphen_values = true)]
        t: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<f64>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<HMode>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
}

const USAGE: u8 = 2;

fn open_output(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { suite, tol_scale, seed, m_max, out } => {
            let config = VerifyConfig { tol_scale, seed, m_max, exec: Execution::default() };
            let report = match run_verify(suite, &config) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(USAGE);
                }
            };
            let failed = report.cases.iter().filter(|c| c.status == archsw::cli::Status::Fail).count();
            eprintln!("{}: {} cases, {} failed", report.suite, report.cases.len(), failed);
            let written = open_output(&out).and_then(|mut w| {
                writeln!(w, "{}", report.to_json())?;
                w.flush()
            });
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Sweep { a, b, out } => {
            let parsed = NegativeTuple::parse_csv(&a).and_then(|a| Ok((a, parse_b_grid(&b)?)));
            let (tuple, grid) = match parsed {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(USAGE);
                }
            };
            let sweep = match run_sweep(&tuple, grid, Execution::default()) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            let written = open_output(&out)
                .map_err(|e| archsw::Error::InvalidInput(e.to_string()))
                .and_then(|w| write_sweep_csv(&sweep, w));
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
            eprintln!("extrapolated limit {:.16e}, target {:.16e}", sweep.extrapolated_limit, sweep.target);
            ExitCode::SUCCESS
        }
        Command::Eval { function, x, a, t, s, m, mode, method } => {
            let params = EvalParams { x, a, t, s, m, mode, method };
            match run_eval(function, &params) {
                Ok(v) => {
                    println!("{v}");
                    ExitCode::SUCCESS
                }
                Err(EvalFailure::Usage(msg)) => {
                    eprintln!("error: {msg}");
                    ExitCode::from(USAGE)
                }
                Err(EvalFailure::Evaluation(v)) => {
                    println!("{v}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
