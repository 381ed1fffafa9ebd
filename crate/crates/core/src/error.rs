use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed description: {0}")]
    Malformed(String),
    #[error("body is not centrally symmetric: {0}")]
    NotSymmetric(String),
    #[error("exponent p = {0} is below 1")]
    ExponentBelowOne(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("zero normal vector")]
    ZeroNormal,
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("polyhedron is unbounded or has no interior around the origin")]
    Unbounded,
    #[error("operation needs a polytope representation, got {0}")]
    NotPolytope(&'static str),
    #[error("dimension {0} is above the supported limit {1}")]
    DimensionTooLarge(usize, usize),
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("line is not contained in the q-subspace")]
    NotInQSubspace,
    #[error("loop is not closed or has fewer than {0} vertices")]
    OpenLoop(usize),
    #[error("graph condition violated: {0}")]
    GraphCondition(String),
    #[error("polynomial is not odd: {0}")]
    NotOdd(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point outside the tabulated range: {0}")]
    OutOfRange(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
