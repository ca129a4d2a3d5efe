//! CODATA 2018 constants and unit helpers (SI).

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Electron mass, kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Atomic mass constant, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Ortho-positronium mass, `2 m_e` (binding-energy defect ignored).
pub const POSITRONIUM_MASS: f64 = 2.0 * ELECTRON_MASS;
/// ⁸⁷Rb atomic mass, kg.
pub const RB87_MASS: f64 = 86.909_180_531 * ATOMIC_MASS_UNIT;
/// ²³Na atomic mass, kg.
pub const NA23_MASS: f64 = 22.989_769_282 * ATOMIC_MASS_UNIT;

pub const NANOMETRE: f64 = 1e-9;

/// nm⁻³ → m⁻³.
pub fn per_nm3_to_per_m3(n: f64) -> f64 {
    n * 1e27
}

/// m⁻³ → nm⁻³.
pub fn per_m3_to_per_nm3(n: f64) -> f64 {
    n * 1e-27
}
