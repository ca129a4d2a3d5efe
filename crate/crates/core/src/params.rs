//! Laboratory parameters to the scaled condensate density `n̄`.

use serde::{Deserialize, Serialize};

use crate::bogoliubov::CondensateScale;
use crate::error::{Error, Result};
use crate::units::{per_nm3_to_per_m3, HBAR, K_B, NA23_MASS, NANOMETRE, POSITRONIUM_MASS, RB87_MASS};

/// `ζ(3/2)` as used in the ideal-gas condensation temperature.
pub const ZETA_3_2: f64 = 2.612;
/// Rounded coefficient of the closed-form `n̄` expression, `2 ζ(3/2)^{2/3}`.
pub const CLOSED_FORM_COEFFICIENT: f64 = 3.79;
/// `n a₀³` above which the gas is flagged as not dilute.
pub const DILUTENESS_LIMIT: f64 = 1e-2;

/// Gas species with a tabulated mass and bare scattering length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Species {
    OrthoPositronium,
    Rubidium87,
    Sodium23,
}

impl Species {
    pub const ALL: [Species; 3] = [Species::OrthoPositronium, Species::Rubidium87, Species::Sodium23];

    pub fn label(self) -> &'static str {
        match self {
            Species::OrthoPositronium => "o-Ps",
            Species::Rubidium87 => "87Rb",
            Species::Sodium23 => "23Na",
        }
    }

    pub fn mass(self) -> f64 {
        match self {
            Species::OrthoPositronium => POSITRONIUM_MASS,
            Species::Rubidium87 => RB87_MASS,
            Species::Sodium23 => NA23_MASS,
        }
    }

    /// Bare s-wave scattering length, m.
    pub fn scattering_length(self) -> f64 {
        match self {
            Species::OrthoPositronium => 0.16 * NANOMETRE,
            Species::Rubidium87 => 5.5 * NANOMETRE,
            Species::Sodium23 => 4.5 * NANOMETRE,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "o-ps" | "ops" | "ps" | "positronium" => Ok(Species::OrthoPositronium),
            "87rb" | "rb87" | "rb" | "rubidium" => Ok(Species::Rubidium87),
            "23na" | "na23" | "na" | "sodium" => Ok(Species::Sodium23),
            other => Err(Error::InvalidInput(format!("unknown species '{other}' (expected o-Ps, 87Rb or 23Na)"))),
        }
    }
}

/// A homogeneous gas at fixed density and temperature (SI units).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSpecies {
    pub name: String,
    /// kg
    pub mass: f64,
    /// m
    pub a0: f64,
    /// m⁻³
    pub density: f64,
    /// K
    pub temperature: f64,
}

impl PhysicalSpecies {
    pub fn new(name: impl Into<String>, mass: f64, a0: f64, density: f64, temperature: f64) -> Result<Self> {
        let s = PhysicalSpecies { name: name.into(), mass, a0, density, temperature };
        s.validate()?;
        Ok(s)
    }

    /// The temperature is chosen so that a fraction `fraction` of the gas is condensed.
    pub fn at_condensate_fraction(name: impl Into<String>, mass: f64, a0: f64, density: f64, fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::InvalidInput(format!("condensate fraction must lie in [0, 1], got {fraction}")));
        }
        let tc = critical_temperature(density, mass)?;
        Self::new(name, mass, a0, density, tc * (1.0 - fraction).powf(2.0 / 3.0))
    }

    pub fn preset(species: Species, density_per_nm3: f64, fraction: f64) -> Result<Self> {
        Self::at_condensate_fraction(
            species.label(),
            species.mass(),
            species.scattering_length(),
            per_nm3_to_per_m3(density_per_nm3),
            fraction,
        )
    }

    fn validate(&self) -> Result<()> {
        let ok = |x: f64| x > 0.0 && x.is_finite();
        if !(ok(self.mass) && ok(self.a0) && ok(self.density)) || !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "species '{}' needs positive mass, a0, density and a non-negative temperature",
                self.name
            )));
        }
        Ok(())
    }

    /// `n a₀³`.
    pub fn diluteness(&self) -> f64 {
        self.density * self.a0.powi(3)
    }

    pub fn is_dilute(&self) -> bool {
        self.diluteness() < DILUTENESS_LIMIT
    }

    /// `g = 4π ħ² a₀ / m`, J·m³.
    pub fn coupling(&self) -> f64 {
        4.0 * std::f64::consts::PI * HBAR * HBAR * self.a0 / self.mass
    }
}

/// Ideal-gas condensation temperature `(2π ħ²/(m k_B)) (n/ζ(3/2))^{2/3}`, K.
pub fn critical_temperature(density: f64, mass: f64) -> Result<f64> {
    if !(density > 0.0 && mass > 0.0 && density.is_finite() && mass.is_finite()) {
        return Err(Error::InvalidInput(format!("need positive density and mass, got n={density}, m={mass}")));
    }
    Ok(2.0 * std::f64::consts::PI * HBAR * HBAR / (mass * K_B) * (density / ZETA_3_2).powf(2.0 / 3.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CondensateFraction {
    pub value: f64,
    pub above_critical: bool,
}

/// `n_c/n = 1 − (T/T_c)^{3/2}`; zero and flagged at or above `T_c`.
pub fn condensate_fraction(temperature: f64, critical: f64) -> Result<CondensateFraction> {
    if !(temperature >= 0.0 && critical > 0.0) {
        return Err(Error::InvalidInput(format!("need T >= 0 and Tc > 0, got T={temperature}, Tc={critical}")));
    }
    if temperature >= critical {
        return Ok(CondensateFraction { value: 0.0, above_critical: temperature > critical });
    }
    Ok(CondensateFraction { value: 1.0 - (temperature / critical).powf(1.5), above_critical: false })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    /// K
    pub t_c: f64,
    pub condensate_fraction: f64,
    pub above_critical: bool,
    /// J·m³
    pub g: f64,
    /// `g n_c`, J
    pub e0: f64,
    /// `g n_c / (k_B T)`
    pub nbar: f64,
    /// Same quantity from the rounded closed form.
    pub nbar_closed_form: f64,
    pub diluteness: f64,
}

/// All derived scales; above `T_c` the condensate quantities are zero and flagged.
pub fn derived_scales(species: &PhysicalSpecies) -> Result<DerivedScales> {
    species.validate()?;
    let t_c = critical_temperature(species.density, species.mass)?;
    let frac = condensate_fraction(species.temperature, t_c)?;
    let g = species.coupling();
    let e0 = g * species.density * frac.value;
    let nbar = if frac.value > 0.0 { e0 / (K_B * species.temperature) } else { 0.0 };
    let closed = if frac.value > 0.0 { closed_form(species, t_c) } else { 0.0 };
    Ok(DerivedScales {
        t_c,
        condensate_fraction: frac.value,
        above_critical: frac.above_critical || frac.value == 0.0,
        g,
        e0,
        nbar,
        nbar_closed_form: closed,
        diluteness: species.diluteness(),
    })
}

fn closed_form(species: &PhysicalSpecies, t_c: f64) -> f64 {
    let t = species.temperature / t_c;
    CLOSED_FORM_COEFFICIENT * (1.0 / t - t.sqrt()) * species.a0 * species.density.cbrt()
}

fn require_condensed(species: &PhysicalSpecies) -> Result<f64> {
    species.validate()?;
    let t_c = critical_temperature(species.density, species.mass)?;
    if species.temperature >= t_c {
        return Err(Error::AboveCritical { temperature: species.temperature, critical: t_c });
    }
    Ok(t_c)
}

/// `n̄ = g n_c / (k_B T)` from the definitions.
pub fn scaled_density(species: &PhysicalSpecies) -> Result<CondensateScale> {
    require_condensed(species)?;
    CondensateScale::new(derived_scales(species)?.nbar)
}

/// `n̄ = 3.79 (T_c/T − √(T/T_c)) a₀ n^{1/3}`.
pub fn scaled_density_closed_form(species: &PhysicalSpecies) -> Result<f64> {
    let t_c = require_condensed(species)?;
    Ok(closed_form(species, t_c))
}

/// Table rows: o-Ps at both ends of its density range, ⁸⁷Rb and ²³Na, all at
/// half condensation.
pub fn species_presets() -> Vec<PhysicalSpecies> {
    [
        (Species::OrthoPositronium, 1e-7),
        (Species::OrthoPositronium, 1e-3),
        (Species::Rubidium87, 1e-9),
        (Species::Sodium23, 1e-9),
    ]
    .into_iter()
    .map(|(s, n)| PhysicalSpecies::preset(s, n, 0.5).expect("preset parameters are valid"))
    .collect()
}
