//! Experiment driver for the switching-regret meta-algorithm: seeded
//! synthetic environments, end-to-end runs, regret/envelope reports, and the
//! file formats behind the `reset` CLI.

pub mod config;
pub mod env;
pub mod report;
pub mod run;

use serde::Serialize;
use thiserror::Error;

/// A failed bound assertion, machine readable for scripted sweeps.
#[derive(Debug, Clone, Serialize)]
pub struct ViolationRecord {
    pub check: String,
    pub seed: u64,
    pub measured: f64,
    pub envelope: f64,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] reset_core::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("bound violation: {} measured {} > envelope {} (seed {})",
            .0.check, .0.measured, .0.envelope, .0.seed)]
    BoundViolation(ViolationRecord),
}

impl HarnessError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::BoundViolation(_) => 3,
            _ => 1,
        }
    }
}
