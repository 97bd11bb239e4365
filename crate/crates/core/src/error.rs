use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix dimensions must be positive")]
    EmptyMatrix,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("invalid Schatten exponent {0}: p must lie in [1, inf]")]
    InvalidExponent(f64),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("certificate not reached within {evals} evaluations: best {best}, achieved bound {achieved_eps:e}")]
    Uncertified {
        best: f64,
        arg: f64,
        achieved_eps: f64,
        evals: usize,
    },

    #[error("unknown law id {0:?}")]
    UnknownLaw(String),

    #[error("law {law} is not asserted at p = {p}")]
    OutOfDomain { law: &'static str, p: String },

    #[error("law {law} expects {expected} input matrices, got {got}")]
    Arity {
        law: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("law {0} is an equality")]
    EqualityLaw(&'static str),

    #[error("format error in {field}: {msg}")]
    Format { field: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
