//! Thermodynamic limit: bulk free energies, saddle-point geometry and
//! densities, series expansions and finite-size corrections.

mod free_energy;
mod geometry;
mod ode;
mod resolvent;
mod subleading;

pub use free_energy::{bulk_f, dfdzeta, f_modular, f_small_gamma, series_terms, FreeEnergy};
pub use geometry::{chem_residual, endpoints, SaddleGeometry};
pub use ode::{ansatz_toda_residual, bulk_ode_residual, ode_check};
pub use resolvent::{
    boundary_value, boundary_value_richardson, density, density_at, resolvent, saddle_residual,
    DensityProfile, RICHARDSON_EPS,
};
pub use subleading::{smooth_fit, spread_over, subleading_af_fit, ModulatedFit, PowerFit};
