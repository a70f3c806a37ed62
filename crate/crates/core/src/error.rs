use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid block width {0}")]
    InvalidBlockWidth(usize),
    #[error("block width {width} exceeds combined bit length {bits}")]
    BlockWidthTooLarge { width: usize, bits: usize },
    #[error("monomial of order {0} cannot be reduced (maximum is 4)")]
    OrderTooHigh(usize),
    #[error("polynomial is not quadratic (found a term of order {0})")]
    NotQuadratic(usize),
    #[error("brute force over {0} qubits exceeds the 24-qubit limit")]
    TooManyQubits(usize),
    #[error("value {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },
    #[error("schedule violates the monotonic constraint")]
    NonMonotone,
    #[error("integrator did not converge: last change {delta:e} after {slices} slices")]
    NonConvergence { delta: f64, slices: usize },
    #[error("calibration grid exhausted; best T = {best_t} with mean success {best_mean}")]
    GridExhausted { best_t: f64, best_mean: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("malformed checkpoint: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
