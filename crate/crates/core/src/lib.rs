//! Density-matrix simulation of measurement-driven quantum error correction
//! treated as a thermodynamic cycle.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`] — dense complex matrices, a cyclic Jacobi Hermitian
//!   eigensolver, matrix functions, Kronecker products, partial traces and
//!   subsystem permutations. Generic over the real scalar type.
//! * [`space`], [`state`] — labeled composite Hilbert spaces, density
//!   matrices, Hamiltonians and thermal (Gibbs) states.
//! * [`entropy`] — von Neumann and relative entropies, mutual informations,
//!   the binary entropy and the entanglement-fidelity bound gap.
//! * [`channel`] — Kraus channels, quantum instruments, indirect measurement
//!   models, channel efficacy and information-gain bounds.
//! * [`qcstate`] — block-decomposed states over quantum factors plus
//!   classical registers; the working representation of cycle stages.
//! * [`measurement`] — heat bookkeeping for indirect measurements.
//! * [`code`] — three-qubit repetition codes and the noise models they
//!   correct.
//! * [`engine`] — the full correction cycle, its stage snapshots, the energy
//!   ledger, and the theorem/inequality evaluators.
//! * [`lab`] — small two-system experiments for the entropy-balance and
//!   first-law identities.
//! * [`scenario`] — serializable scenario and sweep configuration plus report
//!   rows.
//! * [`verify`] — the certification battery run by the CLI and the
//!   acceptance suite.
//!
//! All entropies are in nats and k_B = hbar = 1 throughout; energies are in
//! units of k_B times the reference temperature.

pub mod channel;
pub mod code;
pub mod engine;
pub mod entropy;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod measurement;
pub mod qcstate;
pub mod random;
pub mod scalar;
pub mod scenario;
pub mod space;
pub mod state;
pub mod tol;
pub mod verify;

/// Concrete real scalar used by the physics layers.
pub type Real = f64;
/// Complex number over [`Real`].
pub type C64 = num_complex::Complex<Real>;
/// Dense complex matrix over [`Real`].
pub type CMatrix = linalg::ComplexMatrix<Real>;

pub use error::{Error, Result};
pub use space::CompositeSpace;
pub use state::DensityMatrix;
