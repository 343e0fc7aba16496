use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("vector norm {norm} is not within 1e-6 of 1")]
    NotUnit { norm: f64 },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("Newton iteration did not converge for root {index} of P_{degree}")]
    Convergence { degree: usize, index: usize },
    #[error("weight {weight} at point {index} is not positive")]
    Weight { index: usize, weight: f64 },
    #[error("weights sum to {sum}, expected 4*pi")]
    WeightSum { sum: f64 },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("points on lines {first} and {second} coincide")]
    DuplicatePoint { first: usize, second: usize },
    #[error("quadrature strength {found} is below the required {required}")]
    InsufficientStrength { found: usize, required: usize },
    #[error("{copies} copies exceed the operator check cap of {cap}")]
    CapExceeded { copies: usize, cap: usize },
    #[error("no pure-state count supplied for {copies} copies")]
    MissingCount { copies: usize },
    #[error("outcome probabilities sum to {sum} at theta={theta}, phi={phi}")]
    NotNormalized { theta: f64, phi: f64, sum: f64 },
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
