use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mass must be positive (body {index} has mass {value})")]
    NonPositiveMass { index: usize, value: f64 },

    #[error("gravitational constant must be positive and finite, got {0}")]
    InvalidGravitationalConstant(f64),

    #[error("expected {expected} bodies, got {got}")]
    BodyCount { expected: usize, got: usize },

    #[error("dimension must be 2 or 3, got {0}")]
    Dimension(usize),

    #[error("body {index} has {got} coordinates, expected {expected}")]
    CoordinateCount {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("planar configuration has nonzero out-of-plane coordinate at body {0}")]
    NotPlanar(usize),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("collision between bodies {i} and {j} (distance {distance:e})")]
    Collision { i: usize, j: usize, distance: f64 },

    #[error("masses and positions disagree: {masses} masses for {bodies} bodies")]
    MassCountMismatch { masses: usize, bodies: usize },

    #[error("parameter outside admissible region: requires {constraint}")]
    Domain { constraint: String },

    #[error("degenerate parameters: {0}")]
    Degenerate(String),

    #[error("root not bracketed on [{lo}, {hi}]")]
    RootNotBracketed { lo: f64, hi: f64 },

    #[error("{count} sign changes found on [{lo}, {hi}]; the root is not unique")]
    MultipleRoots { count: usize, lo: f64, hi: f64 },

    #[error("configuration is not central (oracle deviation {deviation:e})")]
    NotCentral { deviation: f64 },

    #[error("all accelerations vanish; cannot fit lambda")]
    ZeroAcceleration,

    #[error("integration step underflow at t = {time}")]
    StepUnderflow { time: f64 },

    #[error("malformed distances: {0}")]
    Distances(String),

    #[error("{0}")]
    Usage(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(constraint: impl Into<String>) -> Self {
        Error::Domain {
            constraint: constraint.into(),
        }
    }
}
