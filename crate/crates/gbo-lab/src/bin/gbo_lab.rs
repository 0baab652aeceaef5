//! Thin command-line front end over the library's run orchestration.
//!
//! Exit codes: 0 all assertions passed, 1 an assertion failed, 2 runtime
//! abort (blow-up, boundary-guard violation, bad config, or I/O error).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gbo_lab::runner::{
    parse_config, parse_sweep, resolve_out_dir, run, sweep, RunStatus, Suite, SuiteOutcome,
};

#[derive(Parser)]
#[command(name = "gbo-lab", about = "Simulation and verification lab for a nonlocal dispersive PDE", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overridden by GBO_LAB_OUT)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's RNG seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the equation and write series.csv plus checkpoints
    Simulate(Common),
    /// Pointwise gap positivity and center-separation checks
    VerifyMonotonicity(Common),
    /// Localized virial functional: M(t), discrete dM/dt, error budget
    VerifyLocal(Common),
    /// Constrained extremization of the weighted nonlinearity pairing
    VerifyPositivity(Common),
    /// Paraproduct identity and space-time norm estimate ratios
    VerifyNorms(Common),
    /// Run every config in a JSON array concurrently
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Concurrent workers
        #[arg(long, default_value_t = 4)]
        workers: usize,
        /// Suites to run (repeatable); defaults to all
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
}

fn print_outcomes(outcomes: &[SuiteOutcome]) {
    for o in outcomes {
        let verdict = if o.passed { "pass" } else { "FAIL" };
        println!("[{verdict}] {}: {}", o.suite, o.notes.join("; "));
    }
}

fn run_single(common: &Common, suite: Suite) -> RunStatus {
    let mut config = match parse_config(&common.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return RunStatus::Abort;
        }
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    let out = resolve_out_dir(common.out.as_deref());
    let (status, outcomes) = run(&config, &[suite], &out);
    print_outcomes(&outcomes);
    status
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match &cli.command {
        Command::Simulate(c) => run_single(c, Suite::Conservation),
        Command::VerifyMonotonicity(c) => run_single(c, Suite::Monotonicity),
        Command::VerifyLocal(c) => run_single(c, Suite::LocalM),
        Command::VerifyPositivity(c) => run_single(c, Suite::Positivity),
        Command::VerifyNorms(c) => run_single(c, Suite::Norms),
        Command::Sweep {
            common,
            workers,
            suites,
        } => {
            let result = (|| {
                let mut configs = parse_sweep(&common.config)?;
                if let Some(seed) = common.seed {
                    for c in &mut configs {
                        c.seed = seed;
                    }
                }
                let selected = if suites.is_empty() {
                    Suite::all()
                } else {
                    suites
                        .iter()
                        .map(|s| Suite::from_name(s))
                        .collect::<gbo_lab::Result<Vec<_>>>()?
                };
                let out = resolve_out_dir(common.out.as_deref());
                sweep(&configs, &selected, &out, *workers)
            })();
            match result {
                Ok(status) => status,
                Err(e) => {
                    eprintln!("error: {e}");
                    RunStatus::Abort
                }
            }
        }
    };
    ExitCode::from(status.exit_code() as u8)
}
