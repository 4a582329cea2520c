//! Quantum Doeblin coefficients and their applications.
//!
//! This crate computes the Doeblin coefficient zoo of a quantum channel
//! (`alpha`, `alpha_wang`, `alpha_plus`, cone-restricted relaxations, and the
//! reverse coefficient) by solving the corresponding semidefinite programs
//! with a self-contained primal-dual interior-point solver over complex
//! Hermitian blocks. On top of the coefficients it provides:
//!
//! - channel construction and composition with the Choi matrix as the
//!   canonical representation ([`channels`]),
//! - state divergences (hockey-stick, trace distance, fidelity, max-relative
//!   entropy, Hellinger of order 1/2) ([`divergences`]),
//! - independent brute-force checkers: the state-exclusion SDP, a direct
//!   trace-distance contraction search, and an alternating see-saw
//!   ([`oracles`]),
//! - calculators and simulators for downstream bounds: barren plateaus,
//!   error-mitigation sample complexity, noisy hypothesis testing, fairness,
//!   and mixing/decoupling times ([`applications`]).

pub mod applications;
pub mod channels;
pub mod divergences;
pub mod doeblin;
pub mod error;
pub mod linalg;
pub mod oracles;
pub mod schema;
pub mod sdp;

pub use channels::{Channel, Family, QuantumState};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianOperator, SubsystemDims, C64};
pub use sdp::{Cone, SdpOptions, SdpProblem, SdpSolution, SdpStatus};
