//! Config-driven experiment runner for the degenerate-diffusion
//! laboratory: coefficient condition analysis, solver runs, front
//! detection, stability verification, the infinite-speed counterexample
//! reproduction, and parameter sweeps. Results land as `results.json`
//! (validating against the schema shipped in `schemas/`), one CSV per
//! series, and optional static SVG plots.

// parameter guards are written `!(x > 0.0)` on purpose: the negated form
// rejects NaN, which `x <= 0.0` lets through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;
pub mod schema;
pub mod svg;

/// A failed invocation: configuration problems exit with code 2, runtime
/// errors with 3. (Failed acceptance checks are not failures; they yield
/// a `fail` status and exit code 4.)
#[derive(Debug, Clone)]
pub enum Failure {
    Validation { message: String, missing: Vec<String> },
    Runtime { message: String },
}

impl Failure {
    pub fn validation(message: String, missing: Vec<String>) -> Self {
        Self::Validation { message, missing }
    }

    pub fn runtime(message: String) -> Self {
        Self::Runtime { message }
    }

    pub fn phase(&self) -> &'static str {
        match self {
            Self::Validation { .. } => "validation",
            Self::Runtime { .. } => "runtime",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Validation { message, .. } | Self::Runtime { message } => message,
        }
    }

    pub fn missing(&self) -> &[String] {
        match self {
            Self::Validation { missing, .. } => missing,
            Self::Runtime { .. } => &[],
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation { .. } => 2,
            Self::Runtime { .. } => 3,
        }
    }
}

impl From<diffusionlab::Error> for Failure {
    fn from(e: diffusionlab::Error) -> Self {
        Self::Runtime { message: e.to_string() }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} error: {}", self.phase(), self.message())?;
        if !self.missing().is_empty() {
            write!(f, " (missing: {})", self.missing().join(", "))?;
        }
        Ok(())
    }
}
