//! Finite-N machinery: derivatives of `φ(t) = c/(ab)`, the scaled Hankel
//! determinants `τ_N/c_N`, partition functions, discrete-sum and Laplace
//! cross-checks and the Toda bilinear identity.

mod derivatives;
mod discrete;
mod laplace;
mod tau;
mod toda;

pub use derivatives::{phi_derivatives, DerivativeTable, Family};
pub use discrete::{c_n, sufficient_cutoff, tau_discrete_sum};
pub use laplace::laplace_moment_check;
pub use tau::{partition_z, tau_scaled, tau_sequence, TauSequence, TauValue};
pub use toda::{toda_residual, TodaResidual};

pub use crate::phase::weights_from;
