//! Exact, desk-scale numerics for Quantum State Distinguishability (QSD).
//!
//! The crate turns circuit descriptions into density matrices and then runs the
//! constructions that surround the QSD problem on them: the polarization
//! pipeline (XOR transform, tensor-power amplification), the distance and closeness
//! zero-knowledge protocols with optimal and adversarial provers, the reduction
//! from honest-verifier proof systems to QSD instances, and trace-norm
//! approximation through the characteristic polynomial.
//!
//! Conventions used everywhere:
//!
//! * The trace norm is *halved*: `‖X‖tr = ½ tr √(X†X)`. Between density
//!   matrices it lies in `[0, 1]`, and `‖A⊗B‖tr = 2‖A‖tr‖B‖tr`.
//! * Qubit `0` is the most significant bit of a basis-state label.
//! * Tensor products put the left operand's indices major.

pub mod capacity;
pub mod circuit;
pub mod error;
pub mod linalg;
pub mod polarize;
pub mod protocols;
pub mod random;
pub mod reduction;
pub mod states;
pub mod tna;

pub use capacity::Capacity;
pub use error::{Error, ParseErrorKind, Result};
pub use linalg::{ComplexMatrix, StateVector, C64};
