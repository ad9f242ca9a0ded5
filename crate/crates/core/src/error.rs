use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("invalid curve parameters: {0}")]
    InvalidCurve(String),

    #[error("p = {p} is a bad prime for {curve}")]
    BadPrime { p: u64, curve: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root-of-unity order {0} is not a power of two")]
    InvalidRootOrder(u64),

    #[error("sum of monomials at ({row}, {col}) is not a monomial")]
    NotMonomial { row: usize, col: usize },

    #[error("matrix is singular or not a generalized permutation matrix")]
    Singular,

    #[error("matrix size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("numeric evaluation of c^q requires c > 0 (got {0}); the branch of c^q is undefined for c < 0")]
    NonPositiveTwist(f64),

    #[error("entry {0} carries a nonzero power of c")]
    TwistedEntry(String),

    #[error("component-group closure exceeded {0} elements")]
    ClosureOverflow(usize),

    #[error("group-averaged moment of order {0} is not rational")]
    NonRational(u32),

    #[error("integer overflow in the exact moment engine")]
    Overflow,

    #[error("matrix deviates from unitary by {0:e}")]
    NotUnitary(f64),

    #[error("Schur iteration did not converge for a {0}x{0} matrix")]
    NoConvergence(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
