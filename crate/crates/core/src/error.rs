use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("point lies inside an excluded neighbourhood: {0}")]
    Domain(String),

    #[error("derivative order {order} is not supported here: {detail}")]
    UnsupportedOrder { order: usize, detail: String },

    #[error("finite-difference estimate did not converge (relative change {change:.3e})")]
    NotConverged { change: f64 },

    #[error("wavefunction vanishes at the reference point; the ratio is undefined")]
    NodeCutoff,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("state cannot be normalized: {0}")]
    Unnormalizable(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("turning points: {0}")]
    TurningPoints(String),

    #[error("matrix is not orthogonal (max deviation {deviation:.3e})")]
    NotOrthogonal { deviation: f64 },

    #[error("density matrix has eigenvalue {value:.3e} below tolerance")]
    NegativeEigenvalue { value: f64 },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
