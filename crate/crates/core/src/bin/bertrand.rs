use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use bertrand_core::cli_reports::{run, Command, JobConfig};
use bertrand_core::frenet_engine::DEFAULT_GRID;

/// Frenet apparatus, classical Bertrand tests and (1,3)-Bertrand mates of
/// timelike curves in semi-Euclidean spaces.
#[derive(Debug, Parser)]
#[command(name = "bertrand", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Input file with a [curve] or [curvatures] section.
    #[arg(long)]
    input: PathBuf,
    /// Directory for the report files.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    /// Integration step for [curvatures] input.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long, allow_hyphen_values = true)]
    gamma_hint: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_hint: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    tol_eq: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_margin: f64,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let config = JobConfig {
        grid: args.grid,
        step: args.step,
        tol_eq: args.tol_eq,
        tol_margin: args.tol_margin,
        gamma_hint: args.gamma_hint,
        alpha_hint: args.alpha_hint,
        ..JobConfig::new(args.command, args.input, args.output)
    };
    ExitCode::from(run(&config) as u8)
}
