//! Numerical tolerances used across the crate.
//!
//! Centralized so that tests, invariant checks and documentation agree on a
//! single set of magnitudes. All values are for `f64` arithmetic.

/// Max permitted elementwise asymmetry `|M - M^dag|` for Hermitian inputs.
pub const HERMITIAN: f64 = 1e-12;

/// Trace of a density matrix must be within this of 1.
pub const TRACE: f64 = 1e-10;

/// Eigenvalues of a density matrix may undershoot 0 by at most this.
pub const PSD_FLOOR: f64 = 1e-10;

/// Max permitted elementwise deviation of `U U^dag` from the identity.
pub const UNITARY: f64 = 1e-10;

/// Eigenvalue magnitudes below this are treated as exact zeros in spectral
/// functions and entropy sums.
pub const ZERO_CUTOFF: f64 = 1e-12;

/// Completeness / comparison tolerance for Kraus sums, projector algebra and
/// Choi-matrix equality.
pub const CHANNEL: f64 = 1e-10;

/// Choi matrices of equal channels must agree elementwise to this.
pub const CHOI: f64 = 1e-12;

/// Two-sided identities (stage balances, theorem equalities) must close to
/// this absolute gap.
pub const IDENTITY_GAP: f64 = 1e-8;

/// One-sided inequalities may undershoot 0 by at most this slack.
pub const INEQ_SLACK: f64 = 1e-9;

/// Eigendecomposition reconstruction error budget, scaled by `1 + max|M|`.
pub const EIG_RECONSTRUCT: f64 = 1e-10;

/// Off-diagonal weight allowed on classical register blocks.
pub const REGISTER_DIAGONAL: f64 = 1e-10;

/// "Apparatus state unchanged" test: max elementwise deviation of the
/// post-measurement apparatus from its thermal initialization.
pub const APPARATUS_FIXED: f64 = 1e-8;

/// Elementwise threshold (scaled by `1 + max|rho|`) under which a state is
/// treated as an exact tensor product when splitting entropies.
pub const PRODUCT_SPLIT: f64 = 1e-13;

/// Register-outcome blocks lighter than this are skipped in entropy
/// assemblies; the neglected contribution is bounded by `w ln(dim)`.
pub const BLOCK_WEIGHT: f64 = 1e-14;

/// Probability mass the first argument of a relative entropy may place on
/// the numerical null space of the second before the divergence is reported
/// as infinite rather than attributed to rounding.
pub const RELATIVE_SUPPORT: f64 = 1e-10;

/// Idempotency, orthogonality, and completeness tolerance for projector
/// families.
pub const PROJECTOR: f64 = 1e-10;

/// A state declared thermal must match the Gibbs state of its Hamiltonian
/// elementwise to this.
pub const THERMAL_STATE: f64 = 1e-10;
