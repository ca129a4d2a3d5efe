//! Scattering of Bogoliubov quasi-particles in a dilute Bose-Einstein
//! condensate: dispersion and coherence factors, isotropic collision
//! integrals, effective scattering lengths and condensate parameters.
//!
//! All energies are in units of `k_B T`, momenta in units of `√(2 m k_B T)`.
//! The condensate enters only through `n̄ = g n_c / (k_B T)`.

/// Library version; recorded in every output and cache key.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod bogoliubov;
pub mod collision;
pub mod distribution;
pub mod effective;
pub mod error;
pub mod mc;
pub mod params;
pub mod quadrature;
pub mod units;

pub use bogoliubov::{
    bose_einstein, kernel_s, kernel_t, particle_weight, zeta, CoherenceFactors, CondensateScale, DosForm,
    KernelForm, Prefactor, PrefactorConstants, QuasiParticle, ScaledEnergy, ScaledMomentum, WindowRule,
};
pub use collision::{m_prime, q_collision, w_collision, CollisionParts, KernelMode};
pub use distribution::IsotropicDistribution;
pub use error::{Error, Result};
pub use quadrature::{integrate_1d, QuadResult, QuadratureSpec};
pub use effective::{
    alpha_s, alpha_t, condensate_growth_rate, low_energy_fraction, mean_alpha, mean_alpha_low, population_report,
    sigma0_t, transition_energy, AlphaCurve, CurveKind, EnergyGrid, NcWeighting, PopulationReport,
};
pub use mc::{mc_angular_window, mc_q_loss, mc_three_momentum, McEstimate, McSpec};
pub use params::{
    condensate_fraction, critical_temperature, derived_scales, scaled_density, scaled_density_closed_form,
    species_presets, DerivedScales, PhysicalSpecies, Species,
};
