//! Crate error type with the exit-code taxonomy used by the CLI.

use thiserror::Error;

/// Errors produced by the laboratory.
///
/// The CLI maps these onto exit codes: precondition/domain failures → 1,
/// solver failures → 2, I/O and format failures → 3.
#[derive(Error, Debug)]
pub enum Error {
    /// An argument was outside an operation's stated domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A named precondition of a pipeline stage failed.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The central charge is too close to zero for a meaningful argument.
    #[error("vanishing central charge: |Z| = {modulus:.3e} below floor {floor:.3e}")]
    VanishingCharge { modulus: f64, floor: f64 },

    /// The Newton line search could not make progress without leaving the
    /// supercritical branch.
    #[error("branch safeguard stall at t = {t:.6e} after {iterations} iterations (res_sup = {res_sup:.3e})")]
    SolverStall {
        t: f64,
        iterations: usize,
        res_sup: f64,
    },

    /// Newton hit the iteration cap without meeting the tolerance.
    #[error("solver did not converge at t = {t:.6e}: res_sup = {res_sup:.3e} after {iterations} iterations")]
    NonConvergence {
        t: f64,
        iterations: usize,
        res_sup: f64,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A file had the wrong magic, version, or payload shape.
    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// Exit code for the CLI surface (1 precondition, 2 solver, 3 I/O).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Precondition(_) => 1,
            Error::VanishingCharge { .. }
            | Error::SolverStall { .. }
            | Error::NonConvergence { .. } => 2,
            Error::Io(_) | Error::Format(_) => 3,
        }
    }
}
