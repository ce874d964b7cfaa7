use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("binomial coefficient C({n}, k) is not supported for n > {max}")]
    BinomialOverflow { n: u32, max: u32 },

    #[error("prediction order {order} is outside 1..={max}")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite gradient at round {round}, correction iteration {iteration} (components {components:?})")]
    NonFiniteGradient {
        round: usize,
        iteration: usize,
        components: Vec<usize>,
    },

    #[error("singular Hessian at t = {t}")]
    SingularHessian { t: f64 },

    #[error("{what} is not available for problem `{problem}`")]
    Unavailable { what: &'static str, problem: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
