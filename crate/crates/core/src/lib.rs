//! Six-vertex model with domain wall boundary conditions.
//!
//! Exact finite-size partition functions through the Hankel determinant of
//! derivatives of `phi(t)`, brute-force enumeration of ice configurations,
//! and the thermodynamic-limit layer (bulk free energies in the
//! ferroelectric, disordered and anti-ferroelectric phases, saddle-point
//! endpoint geometry, eigenvalue densities and the theta-modulated
//! subleading behaviour of the anti-ferroelectric phase).
//!
//! All real arithmetic runs on MPFR floats at an explicit [`Precision`].
//! Nothing in the crate keeps global precision state.

pub mod asymptotics;
mod error;
pub mod exact;
pub mod identities;
pub mod oracle;
pub mod phase;
mod precision;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
pub use phase::{Phase, PhaseParams, Weights};
pub use precision::{parse_float, Precision, GUARD_BITS};

pub use rug::Float;
