use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected S^{expected}, got S^{found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid harmonic index: degree {degree}, order {order}")]
    InvalidIndex { degree: u32, order: i32 },

    #[error("unsupported sphere dimension {0} (supported: 2..=5)")]
    UnsupportedDimension(usize),

    #[error("invalid Lebesgue exponent {0}")]
    InvalidExponent(f64),

    #[error("expected a single-degree coefficient vector, found degrees {0:?}")]
    MultiDegreeInput(Vec<u32>),

    #[error("quadrature for {what} needs {nodes} nodes, over the budget of {budget}")]
    InfeasibleQuadrature { what: String, nodes: usize, budget: usize },

    #[error("degree window around {center} reaches degree {degree}, over the budget of {budget}")]
    WindowBudget { center: f64, degree: u32, budget: u32 },

    #[error("degree {degree} exceeds the limit {limit}")]
    DegreeLimit { degree: u32, limit: u32 },

    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("sample {index} is not positive: ({x}, {y})")]
    NonPositiveSample { index: usize, x: f64, y: f64 },

    #[error("invalid family selection: {0}")]
    InvalidFamily(String),

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),
}
