use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero has no canonical p-adic expansion")]
    ZeroExpansion,

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("degenerate quadratic coefficient: the Gauss integral needs a != 0 (use the linear character integral)")]
    DegenerateQuadratic,

    #[error("degenerate time interval: duration must be nonzero")]
    DegenerateInterval,

    #[error("degenerate action form: the mixed partial derivative vanishes")]
    DegenerateForm,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("resource limit: {required} cosets requested, cap is {cap}")]
    ResourceLimit { required: u128, cap: u64 },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("outside the convergence domain: {0}")]
    Domain(String),

    #[error("no square root in Q_{0}")]
    NoSquareRoot(u64),

    #[error("insufficient precision: need O(p^{needed}), have O(p^{available})")]
    PrecisionInsufficient { needed: i64, available: i64 },

    #[error("coset sum is not a single root-of-unity multiple: {0}")]
    NotAnAmplitude(String),
}

pub type Result<T> = std::result::Result<T, Error>;
