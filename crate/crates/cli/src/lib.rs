//! Declarative experiment runner on top of the `macrospin` library.
//!
//! A run reads one strict JSON config, writes CSV artifacts plus a
//! `summary.json` into an output directory, and reports through its exit code
//! whether any numerical invariant was violated.

pub mod config;
mod experiments;
mod run;

pub use config::{parse_config, parse_delta_m_rule, ConfigError, DeltaMRule, ExperimentConfig, ExperimentKind};
pub use run::{run, Check, CheckKind, RunError, Summary};
