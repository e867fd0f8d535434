use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("unsupported dimension n = {0}")]
    Dimension(usize),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Quadrature did not reach the requested tolerance after refinement.
    #[error("accuracy not reached: estimated error {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    Accuracy { estimate: f64, tolerance: f64 },

    /// A scaling fit could not be trusted; carries the raw data.
    #[error("inconclusive fit: {reason}")]
    InconclusiveFit { reason: String, points: Vec<(f64, f64)> },

    #[error("curve is not of finite type at s0 = {s0} (all derivatives up to order {m_max} vanish)")]
    UntypedCurve { s0: f64, m_max: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
