use thiserror::Error;

/// Errors surfaced by the library. Precondition failures carry enough
/// context to name the violated hypothesis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("gcd({0}, {1}) != 1")]
    NotCoprime(u64, u64),

    #[error("element {0} does not lie in {1}")]
    NotInRing(String, String),

    #[error("columns are linearly dependent")]
    DependentColumns,

    #[error("matrix is not invertible over {0}")]
    NotInvertible(String),

    #[error("group closure exceeded cap {cap}; the generated group is probably infinite")]
    ClosureCapExceeded { cap: usize },

    #[error("group order {order} is divisible by {ell}")]
    OrderDivisibleByEll { order: usize, ell: u64 },

    #[error("criterion inapplicable: q = ell = {0}")]
    CriterionInapplicable(u64),

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("bilinear form is degenerate")]
    DegenerateForm,

    #[error("subspace is not stable under the group action mod {ell}")]
    NotStableMod { ell: u64 },

    #[error("exhaustive enumeration would visit {order} elements, over budget {budget}; use sampled mode")]
    BudgetExceeded { order: String, budget: u64 },

    #[error("p-adic precision exhausted at k = {0}; retry with a larger precision")]
    PrecisionExhausted(u32),

    #[error("polarization degree is required but missing")]
    MissingPolarizationDegree,

    #[error("invalid reduction data: {0}")]
    InvalidReductionData(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
