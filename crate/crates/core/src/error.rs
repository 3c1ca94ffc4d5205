use alloc::string::String;

/// Errors raised by the operator, calculus and subsolution routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    /// `index` is the first `j` with `σ_j ≤ 0` (1-based, as in `Γ_k`).
    #[error("point outside the admissible cone: σ_{index} = {value:e} is not positive")]
    OutsideCone { index: usize, value: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
