use thiserror::Error;

/// Errors surfaced by the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {0} is non-positive)")]
    NonPositiveDefinite(usize),

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("rank-deficient least-squares system (pivot {pivot} below conditioning floor)")]
    RankDeficient { pivot: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("non-positive basis exponent: {0}")]
    NonPositiveExponent(String),

    #[error("exponents {i} and {j} are closer than the conditioning guard")]
    ExponentsTooClose { i: usize, j: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("residual imaginary part {residual:e} exceeds {limit:e} after spin contraction")]
    ResidualImaginary { residual: f64, limit: f64 },

    #[error("ambiguous energy cut: bare eigenvalue {value} lies within the guard band of the cut {cut}")]
    AmbiguousCut { value: String, cut: String },

    #[error("degenerate denominator between states {i} and {n} in the second-order sum")]
    DegenerateDenominator { i: usize, n: usize },

    #[error("state index {index} out of range ({count} states)")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("quadrature did not converge (error estimate {0:e})")]
    QuadratureNotConverged(f64),

    #[error("defined for equal masses only: {0}")]
    EqualMassesRequired(&'static str),

    #[error("scan point at alpha_inverse offset {offset} failed: {source}")]
    ScanPoint {
        offset: i64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
