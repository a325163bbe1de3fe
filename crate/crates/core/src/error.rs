use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("malformed site structure: {0}")]
    SiteStructure(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("iteration failed to converge (residual {residual:.3e})")]
    NoConvergence { residual: f64 },

    #[error("ill-conditioned basis (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("pole encountered in {0}")]
    Pole(&'static str),

    #[error("operation requires boundary set {expected}")]
    WrongBoundarySet { expected: &'static str },

    #[error("degenerate right-hand side: all entries below {threshold:e}")]
    DegenerateFit { threshold: f64 },

    #[error("weight {0} is not dominant")]
    NonDominant(String),

    #[error("cardinalities {m:?} are inadmissible (Dynkin labels {labels:?})")]
    Inadmissible { m: Vec<usize>, labels: Vec<i64> },

    #[error("negative multiplicity while peeling weight {0}")]
    NegativeMultiplicity(String),

    #[error("singular Jacobian (condition number {condition:.3e})")]
    SingularJacobian { condition: f64 },

    #[error("Newton iteration diverged: {0}")]
    Diverged(String),

    #[error("rejected root configuration: {0}")]
    Rejected(String),

    #[error("operator is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("table data: {0}")]
    TableData(String),
}
