use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::ExperimentConfig;
use crate::experiments;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Must hold for any input; a failure aborts with exit code 2.
    Invariant,
    /// A calibrated expectation about the physics; recorded, never fatal.
    Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub results: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Summary {
    pub fn failed_invariants(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| c.kind == CheckKind::Invariant && !c.passed).map(|c| c.name.as_str()).collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invariant violated: {}", .0.join(", "))]
    Invariant(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(#[from] macrospin::Error),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 1,
            RunError::Invariant(_) | RunError::Numerical(_) => 2,
            RunError::Io { .. } => 3,
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

/// Runs one experiment into `out_dir` and writes `summary.json` there, also
/// when the experiment stops early on an error.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> Result<Summary, RunError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut ctx = experiments::Ctx::new(out_dir);
    let outcome = experiments::dispatch(config, &mut ctx);
    let (results, error) = match &outcome {
        Ok(v) => (v.clone(), None),
        Err(e) => (Value::Null, Some(e.to_string())),
    };
    let summary = Summary {
        experiment: config.experiment.name().to_string(),
        config: config.clone(),
        results,
        checks: ctx.into_checks(),
        error,
    };
    let path = out_dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    fs::write(&path, text).map_err(io_err(&path))?;
    outcome?;
    let failed = summary.failed_invariants();
    if !failed.is_empty() {
        return Err(RunError::Invariant(failed.into_iter().map(String::from).collect()));
    }
    Ok(summary)
}
