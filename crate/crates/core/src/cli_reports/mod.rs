//! Batch front end: job configuration, input files, the command pipeline and
//! report files.
//!
//! Exit codes: 0 on success, 2 on a mathematical rejection (with a report
//! naming the reason), 1 on input or IO errors.

mod input;
mod report;
mod run;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::frenet_engine::DEFAULT_GRID;

pub use input::{
    read_samples, BertrandSection, CurvatureSection, CurveSection, ExprField, InputFile, ScanSection,
};
pub use report::{apparatus_table, emit_report, CsvTable, JobStatus, Report};
pub use run::{execute, run};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl CliError {
    pub(crate) fn io(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Command {
    Classify,
    Frenet,
    Synth,
    FitClassical,
    ScanClassical,
    BertrandCheck,
    BertrandMate,
    BertrandVerify,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Classify,
        Command::Frenet,
        Command::Synth,
        Command::FitClassical,
        Command::ScanClassical,
        Command::BertrandCheck,
        Command::BertrandMate,
        Command::BertrandVerify,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Frenet => "frenet",
            Command::Synth => "synth",
            Command::FitClassical => "fit-classical",
            Command::ScanClassical => "scan-classical",
            Command::BertrandCheck => "bertrand-check",
            Command::BertrandMate => "bertrand-mate",
            Command::BertrandVerify => "bertrand-verify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| CliError::Config(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    pub input: PathBuf,
    /// Directory receiving the report files.
    pub output: PathBuf,
    pub grid: usize,
    pub step: f64,
    pub tol_eq: f64,
    pub tol_margin: f64,
    /// Overrides `[bertrand] gamma_hint` of the input file.
    pub gamma_hint: Option<f64>,
    /// Overrides `[bertrand] alpha_hint` of the input file.
    pub alpha_hint: Option<f64>,
}

impl JobConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>, output: impl Into<PathBuf>) -> Self {
        Self {
            command,
            input: input.into(),
            output: output.into(),
            grid: DEFAULT_GRID,
            step: 1e-3,
            tol_eq: 1e-8,
            tol_margin: 1e-6,
            gamma_hint: None,
            alpha_hint: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid < 16 {
            return Err(CliError::Config(format!("grid size must be at least 16, found {}", self.grid)));
        }
        for (name, v) in [("step", self.step), ("tol-eq", self.tol_eq), ("tol-margin", self.tol_margin)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive, found {v}")));
            }
        }
        for (name, v) in [("gamma-hint", self.gamma_hint), ("alpha-hint", self.alpha_hint)] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(CliError::Config(format!("{name} must be finite, found {v}")));
                }
            }
        }
        Ok(())
    }
}
