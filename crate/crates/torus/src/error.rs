use crate::solver::SolveReport;

/// Errors from grid, geometry and solver routines.
#[derive(Debug, thiserror::Error)]
pub enum TorusError {
    #[error(transparent)]
    Core(#[from] fnell_core::Error),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("grid mode mismatch: {0}")]
    Mode(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("degenerate class: {0}")]
    DegenerateClass(String),
    /// `λ(A[u])` left the cone at `point` (flat grid index).
    #[error("inadmissible at grid point {point}: {source}")]
    Inadmissible { point: usize, source: fnell_core::Error },
    #[error("Newton stagnated at t = {t} after {iterations} iterations (residual {residual:e}): {reason}")]
    Stagnation { t: f64, iterations: usize, residual: f64, reason: String },
    /// The continuity path could not be completed; `report` holds the steps
    /// accepted so far.
    #[error("continuity path aborted at t = {}: {cause}", report.final_t)]
    Aborted { report: Box<SolveReport>, cause: Box<TorusError> },
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed field file: {0}")]
    Format(String),
}

impl TorusError {
    /// The underlying failure, looking through [`TorusError::Aborted`].
    pub fn root(&self) -> &TorusError {
        match self {
            TorusError::Aborted { cause, .. } => cause.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, TorusError>;

pub(crate) fn argument(msg: impl Into<String>) -> TorusError {
    TorusError::Argument(msg.into())
}
