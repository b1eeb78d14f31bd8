use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}; only 1 and 2 are supported")]
    UnsupportedDimension(usize),

    #[error("{n} cells per direction cannot hold a stencil of half-width {m} (need at least {min})")]
    MeshTooSmall { n: usize, m: usize, min: usize },

    #[error("order must be even, got {0}")]
    OddOrder(usize),

    #[error("order {order} is not supported with {bc} boundary conditions")]
    UnsupportedOrder { order: usize, bc: &'static str },

    #[error("Lagrange node {k} lies outside the stencil nodes -{m}..={}", m + 1)]
    NodeOutOfRange { k: i64, m: usize },

    #[error("moment system for half-width {0} is singular")]
    SingularMomentSystem(usize),

    #[error("flux coefficients for half-width {0} differ between the left and right constructions")]
    FluxMismatch(usize),

    #[error("point {0:?} lies outside the unit domain")]
    PointOutsideDomain(Vec<f64>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quadrature order {0} is outside 1..=16")]
    QuadratureOrder(usize),

    #[error("tolerance {0:e} is outside [1e-14, 1e-6]")]
    Tolerance(f64),

    #[error("matrix is singular: factorization broke down at column {column}")]
    SingularMatrix { column: usize },

    #[error("{method} stagnated after {iterations} iterations at residual {residual:e}")]
    Stagnation {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("problem `{name}` does not satisfy {what}")]
    IncompatibleProblem { name: String, what: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("run with n = {n} failed: {source}")]
    AtMesh { n: usize, source: Box<Error> },
}

impl Error {
    /// Innermost error, looking through [`Error::AtMesh`].
    pub fn root(&self) -> &Error {
        match self {
            Error::AtMesh { source, .. } => source.root(),
            other => other,
        }
    }

    /// Whether the linear solver (not the input) caused the failure.
    pub fn is_solver_failure(&self) -> bool {
        matches!(self.root(), Error::SingularMatrix { .. } | Error::Stagnation { .. })
    }
}
