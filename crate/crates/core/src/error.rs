use core::fmt;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its documented domain.
    InvalidParameter(&'static str),
    /// Two operands have incompatible dimensions.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// An exact oracle was called on a matrix above its size guard.
    SizeGuard { limit: usize, got: usize },
    /// The iterative eigensolver ran out of iterations.
    NoConvergence { iterations: usize, residual: f64 },
    /// A random draw degenerated (all retries produced a near-zero vector).
    DegenerateDraw,
    /// The known-center oracle was given a zero center.
    ZeroCenter,
    /// An aggregate over an empty collection.
    EmptyInput,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "dimension mismatch for {what}: expected {expected}, got {got}"),
            Error::SizeGuard { limit, got } => {
                write!(f, "exact oracle size guard: order {got} exceeds limit {limit}")
            }
            Error::NoConvergence {
                iterations,
                residual,
            } => write!(
                f,
                "eigensolver did not converge after {iterations} iterations (last residual {residual:e})"
            ),
            Error::DegenerateDraw => write!(f, "random draw degenerated to a near-zero vector"),
            Error::ZeroCenter => write!(f, "center vector must be nonzero"),
            Error::EmptyInput => write!(f, "input collection is empty"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
