use thiserror::Error;

/// Errors raised by the penalty library, the solvers and the SVM layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid penalty: {0}")]
    InvalidPenalty(String),

    #[error("operation not supported for penalty kind {0}")]
    UnsupportedKind(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The simplex hit a column whose only candidate pivots are below the
    /// pivot tolerance, or produced a point violating the feasibility check.
    #[error("degenerate pivot: {0}")]
    DegeneratePivot(String),

    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    /// Conditional gradient ran out of iterations. Carries the best iterate
    /// and its gap so callers that accept inexact solves can still use it.
    #[error("tolerance not met after {iterations} iterations (gap {gap:e})")]
    ToleranceNotMet {
        iterations: usize,
        gap: f64,
        best: Vec<f64>,
    },

    #[error("subproblem failed at iteration {iteration}: {source}")]
    Subproblem {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("objective increased at iteration {iteration}: {before:e} -> {after:e}")]
    ObjectiveIncrease { iteration: usize, before: f64, after: f64 },

    #[error("incompatible scheme/penalty pairing: {0}")]
    Incompatible(String),

    #[error("{0}")]
    Refused(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid data: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
