//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M[i][j] - conj(M[j][i])| = {deviation:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("expected a {expected_rows}x{expected_cols} matrix, got {rows}x{cols}")]
    WrongDimension {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("density matrix invariant violated: {0}")]
    InvariantViolation(String),

    #[error("eta gap is degenerate (|eta| = {eta:e}); the closed-form thermal backend is undefined here, use the numeric backend")]
    DegenerateEta { eta: f64 },

    #[error("the closed-form evolution backend only supports charger-only mode")]
    UnsupportedCombination,

    #[error("the eigenbasis coherence measure requires the battery Hamiltonian")]
    MissingHamiltonian,

    #[error(
        "time grid is not uniform at index {index}: spacing {found:e} vs expected {expected:e}"
    )]
    NonUniformGrid {
        index: usize,
        found: f64,
        expected: f64,
    },

    #[error("analytic power is only defined for charger-only evolution")]
    AnalyticUnavailable,

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("config parse error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io error on '{path}': {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    /// Exit-code class used by the command-line front end: 1 usage,
    /// 2 numerical invariant, 3 io.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnknownPreset(_)
            | Error::InvalidScenario(_)
            | Error::Config { .. }
            | Error::InvalidParameter(_)
            | Error::UnsupportedCombination
            | Error::MissingHamiltonian
            | Error::AnalyticUnavailable => 1,
            Error::Io { .. } | Error::Serialize(_) => 3,
            _ => 2,
        }
    }
}
