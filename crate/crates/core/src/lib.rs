//! Zero-temperature Casimir energy and surface force of a dilute, homogeneous,
//! nonmagnetic dielectric ball, built from pairwise retarded dipole-dipole
//! interactions between its atoms.
//!
//! Natural units are used throughout: ħ = c = 1 and a single free length unit
//! `L`. Frequencies are in `1/L`, polarizabilities in `L³`, number densities in
//! `L⁻³`, energies in `1/L` and surface pressures in `1/L³`.
//!
//! The energy is available three ways:
//!
//! * [`energy::energy_brute_force`] integrates the pair potential over all
//!   admissible atom pairs inside the ball (slow, used as an oracle);
//! * [`energy::energy_analytic`] evaluates the closed single-frequency integral
//!   with a per-term breakdown;
//! * [`energy::energy_via_kernel`] uses the dimensionless kernel `f(N, p)`.
//!
//! The surface force follows from the spectral double integral
//! ([`force::force_spectral`]) or from a constrained finite difference of the
//! energy ([`force::force_finite_difference`]).

pub mod cli;
pub mod energy;
pub mod error;
pub mod force;
pub mod geometry;
pub mod pair_potential;
pub mod polarizability;
pub mod quadrature;
pub mod special_functions;
pub mod validation;

pub use energy::{EnergyBreakdown, EnergyMethod, KernelPoint};
pub use error::{CasimirError, Result};
pub use force::{ForceMethod, ForceResult};
pub use polarizability::{BallGeometry, Oscillator, PolarizabilityModel, SpectralTable};
pub use quadrature::{IntegralResult, QuadratureConfig};
