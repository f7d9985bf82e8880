use thiserror::Error;

/// Errors raised by the library layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet `{0}` is empty")]
    EmptyAlphabet(String),
    #[error("alphabet `{name}` repeats symbol `{symbol}`")]
    DuplicateSymbol { name: String, symbol: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown symbol `{symbol}` for variable `{variable}`")]
    UnknownSymbol { variable: String, symbol: String },
    #[error("variable `{0}` appears more than once")]
    DuplicateVariable(String),
    #[error("variable sets overlap on `{0}`")]
    OverlappingVariables(String),
    #[error("variable set is empty")]
    EmptyVariableSet,
    #[error("expected {expected} cells, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("negative or non-finite probability {0}")]
    InvalidMass(f64),
    #[error("probability mass sums to {0}, not 1")]
    NotNormalized(f64),
    #[error("channel row {row} sums to {sum}, not 1")]
    RowNotStochastic { row: usize, sum: f64 },
    #[error("channel conditions on `{0}`, which does not match the base joint")]
    ConditioningMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("posterior weights are all zero")]
    ZeroWeights,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors that signal a broken probabilistic invariant
    /// (bad normalization, negative mass) rather than malformed input.
    pub fn is_invariant_breach(&self) -> bool {
        matches!(
            self,
            Error::InvalidMass(_)
                | Error::NotNormalized(_)
                | Error::RowNotStochastic { .. }
                | Error::Numerical(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
