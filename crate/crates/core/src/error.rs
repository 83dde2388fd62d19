use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A simplex of the Gale triangulation has non-positive volume, so the
    /// points do not lie (positively oriented) on a d-order curve.
    #[error("points are not in d-order position; simplex {tuple:?} has signed volume {volume:e}")]
    InputNotDOrder { tuple: Vec<usize>, volume: f64 },

    #[error("matrix is not skew-symmetric (asymmetry {asymmetry:e})")]
    NotSkewSymmetric { asymmetry: f64 },

    #[error("zero displacement: curve is closed")]
    ZeroDisplacement,
}
