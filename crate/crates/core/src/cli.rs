//! Command-line driver.
//!
//! Exit codes: 0 all tests passed, 1 at least one test did not pass,
//! 2 usage error, 3 the model lacks a capability the harness needs.

use std::ffi::OsString;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use crate::axioms::run_all_with_threads;
use crate::config::{Mode, TestConfig};
use crate::error::HarnessError;
use crate::registry::{model_names, resolve_model};

pub const EXIT_PASSED: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INCOMPATIBLE: u8 = 3;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Full,
    Smoke,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// Run the twelve axiom tests against a model.
#[derive(Debug, Parser)]
#[command(name = "agitb", version)]
struct Cli {
    /// Model to evaluate: a fixture or a registered name (see --list-models).
    #[arg(long, required_unless_present = "list_models")]
    model: Option<String>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value = "full")]
    mode: ModeArg,

    /// Override the trial count (simulated infinity).
    #[arg(long)]
    trials: Option<u64>,

    #[arg(long, default_value_t = 10)]
    input_bits: usize,

    #[arg(long, default_value_t = 7)]
    period: usize,

    #[arg(long, default_value_t = 10)]
    rho: usize,

    /// Write the JSON report here.
    #[arg(long)]
    report: Option<std::path::PathBuf>,

    #[arg(long, value_enum, default_value = "off")]
    early_exit: Switch,

    /// Skip the wall-clock test; the overall verdict is then FAIL.
    #[arg(long)]
    skip_timing: bool,

    #[arg(long)]
    list_models: bool,
}

fn threads_from_env() -> Result<Option<usize>, HarnessError> {
    match std::env::var("HARNESS_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(HarnessError::Usage(format!(
                "HARNESS_THREADS must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn execute(cli: Cli) -> Result<bool, HarnessError> {
    let mode = match cli.mode {
        ModeArg::Full => Mode::Full,
        ModeArg::Smoke => Mode::Smoke,
    };
    let mut config = TestConfig {
        input_size: cli.input_bits,
        pattern_period: cli.period,
        rho: cli.rho,
        early_exit: matches!(cli.early_exit, Switch::On),
        skip_timing: cli.skip_timing,
        ..TestConfig::default()
    }
    .with_mode(mode)
    .with_seed(cli.seed);
    if let Some(t) = cli.trials {
        config = config.with_trials(t);
    }
    config.validate()?;
    let name = cli.model.expect("clap enforces --model");
    let factory = resolve_model(&name, config.input_size)?;
    let report = run_all_with_threads(factory.as_ref(), &config, threads_from_env()?)?;
    print!("{}", report.summary());
    if let Some(path) = cli.report {
        std::fs::write(&path, report.to_json())
            .map_err(|e| HarnessError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(report.passed)
}

/// Parses `args` (program name first), runs, prints, and returns the exit
/// code. Registered models must be in place before the call.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASSED
            };
        }
    };
    if cli.list_models {
        for (name, summary) in model_names() {
            println!("{name:<20} {summary}");
        }
        return EXIT_PASSED;
    }
    match execute(cli) {
        Ok(true) => EXIT_PASSED,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                HarnessError::Usage(_) => EXIT_USAGE,
                HarnessError::Incompatible(_) => EXIT_INCOMPATIBLE,
            }
        }
    }
}

/// [`run`] on the process arguments.
pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
