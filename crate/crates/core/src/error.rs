//! Crate-wide error type.

/// Errors surfaced by the simulation layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {max_asymmetry:.3e})")]
    NonHermitianInput { max_asymmetry: f64 },

    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("function produced a non-finite value on the retained spectrum: {context}")]
    DomainError { context: String },

    #[error("unknown subsystem label `{label}`")]
    UnknownLabel { label: String },

    #[error("invalid subsystem permutation: {context}")]
    InvalidPermutation { context: String },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPSD { min_eigenvalue: f64 },

    #[error("argument out of range: {context}")]
    OutOfRange { context: String },

    #[error("instrument branch is not a single projector: {context}")]
    NotProjective { context: String },

    #[error("Kraus set exceeds trace preservation (largest eigenvalue of sum K'K is 1 + {excess:.3e})")]
    NotTraceNonIncreasing { excess: f64 },

    #[error("channel is not trace preserving (max deviation {max_deviation:.3e})")]
    NotTracePreserving { max_deviation: f64 },

    #[error("invalid probability: {context}")]
    InvalidProbability { context: String },

    #[error("apparatus state is not thermal for the declared Hamiltonian (max deviation {max_deviation:.3e})")]
    ApparatusNotThermal { max_deviation: f64 },

    #[error("hypothesis violated (assumption {index}): {context}")]
    HypothesisViolated { index: usize, context: String },

    #[error("degenerate input: {context}")]
    DegenerateInput { context: String },

    #[error("relative entropy is infinite in {context}")]
    InfiniteSentinel { context: String },

    #[error("eigensolver failed to converge after {sweeps} sweeps (off-norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Shorthand for dimension-mismatch errors.
    pub fn dim(context: impl Into<String>) -> Self {
        Error::DimensionMismatch { context: context.into() }
    }
}
