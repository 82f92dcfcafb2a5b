use thiserror::Error;

/// Errors produced by graph loading, model evaluation and seed selection.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text (edge lists, config files).
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Input violates a documented precondition or invariant.
    #[error("{0}")]
    Domain(String),

    /// A minimization search exhausted its budget/round cap without
    /// reaching ratio 1. Carries the best ratio seen for reporting.
    #[error("infeasible: {msg} (best ratio reached: {best_ratio})")]
    Infeasible { msg: String, best_ratio: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
