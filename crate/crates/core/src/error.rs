//! Error type shared across the crate.

/// Errors produced by matrix construction, data validation, bound
/// evaluation, and the validation harnesses.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Matrix data violates a structural invariant (non-finite entry,
    /// wrong shape, asymmetry).
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// A labeled sample violates its invariants (label out of range,
    /// empty class, too few examples).
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    /// A discrete distribution violates its invariants (probabilities
    /// do not sum to one, a class has zero marginal mass).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A weight vector over classifiers is not a probability
    /// distribution.
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    /// Two inputs that must agree in length or order do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A scalar parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A simulation configuration is infeasible or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// The symmetric eigensolver did not reach its residual threshold
    /// within the sweep budget.
    #[error("eigensolver did not converge: off-diagonal residual {residual:.3e} after {sweeps} sweeps")]
    NonConvergence { residual: f64, sweeps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
