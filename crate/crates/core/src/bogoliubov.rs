//! Closed-form pieces of Bogoliubov theory for a uniform condensate.
//!
//! Everything is written in scaled units: energies in units of `k_B T`, and
//! momenta scaled so that the free dispersion is `E = p²` (the boson mass and
//! `ħ` are absorbed). The Bogoliubov dispersion then reads
//!
//! ```text
//! E(p) = sqrt((p² + n̄)² − n̄²),      p(E) = sqrt(sqrt(E² + n̄²) − n̄)
//! ```
//!
//! where `n̄ = g n_c / k_B T` is the only parameter describing the condensate.
//! All functions are pure; limit values at `E = 0` are hard-coded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::HBAR;

/// Quasi-particle energy in units of `k_B T`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ScaledEnergy(pub f64);

/// Quasi-particle momentum in the scaled units where `E_free = p²`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ScaledMomentum(pub f64);

impl From<f64> for ScaledEnergy {
    fn from(v: f64) -> Self {
        ScaledEnergy(v)
    }
}

impl From<f64> for ScaledMomentum {
    fn from(v: f64) -> Self {
        ScaledMomentum(v)
    }
}

/// Form of the collision kernels `T` and `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum KernelForm {
    /// The five-term `T` and six-term `S` exactly as tabulated.
    #[default]
    AsPrinted,
    /// The printed kernels averaged over the index exchanges that the
    /// T-matrix should respect: `1↔2`, `3↔4` (and both) for `T`, `2↔3` for `S`.
    SymmetrizedLiterature,
}

/// Density-of-states shape used in population averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum DosForm {
    /// `ρ ∝ p² dp/dE` with the Bogoliubov dispersion, i.e. `p·χ(E)`.
    #[default]
    DerivedFromDispersion,
    /// `(E/√n̄)·sqrt((sqrt(x²+1) − x)/(1 + x²))` with `x = E/n̄`.
    AsPrinted,
}

impl KernelForm {
    pub fn label(self) -> &'static str {
        match self {
            KernelForm::AsPrinted => "as-printed",
            KernelForm::SymmetrizedLiterature => "symmetrized-literature",
        }
    }
}

impl DosForm {
    pub fn label(self) -> &'static str {
        match self {
            DosForm::DerivedFromDispersion => "derived",
            DosForm::AsPrinted => "as-printed",
        }
    }
}

/// Bogoliubov amplitudes `(u, v)` of one quasi-particle, `u² + v² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceFactors {
    pub u: f64,
    pub v: f64,
}

/// The dimensionless condensate density `n̄ = g n_c / k_B T`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CondensateScale {
    nbar: f64,
}

/// Everything the collision integrands need about one energy, computed once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiParticle {
    pub energy: f64,
    pub momentum: f64,
    pub u: f64,
    pub v: f64,
    /// `E/sqrt(E² + n̄²)`, the Jacobian `d(p²)/dE`.
    pub chi: f64,
}

/// How the momentum window of `ζ` is evaluated. `Corrupted` loses a factor
/// of two and exists only so that the oracle suite can demonstrate it
/// catches a broken kernel. Edge mutations are useless for that: dropping
/// the clamp is inert on shell, and moving an edge lets soft partners into
/// the window and makes the loss integral diverge.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum WindowRule {
    #[default]
    Clamped,
    Corrupted,
}

impl CondensateScale {
    /// Above this value the dilute-gas (BBP) treatment is questionable.
    pub const DILUTE_LIMIT: f64 = 0.1;

    pub fn new(nbar: f64) -> Result<Self> {
        if !nbar.is_finite() || nbar < 0.0 {
            return Err(Error::InvalidInput(format!(
                "condensate scale must be finite and non-negative, got {nbar}"
            )));
        }
        Ok(CondensateScale { nbar })
    }

    pub fn nbar(self) -> f64 {
        self.nbar
    }

    pub fn outside_dilute_regime(self) -> bool {
        self.nbar > Self::DILUTE_LIMIT
    }

    /// Bogoliubov dispersion `E(p) = p·sqrt(p² + 2n̄)`.
    pub fn dispersion(self, p: ScaledMomentum) -> ScaledEnergy {
        let p = p.0;
        ScaledEnergy(p * (p * p + 2.0 * self.nbar).sqrt())
    }

    /// Inverse dispersion; `sqrt(E² + n̄²) − n̄` is rewritten to avoid
    /// cancellation in the phonon regime.
    pub fn inverse_dispersion(self, e: ScaledEnergy) -> ScaledMomentum {
        ScaledMomentum(self.momentum(e.0))
    }

    pub(crate) fn momentum(self, e: f64) -> f64 {
        if e <= 0.0 {
            return 0.0;
        }
        let r = e.hypot(self.nbar);
        (e * e / (r + self.nbar)).sqrt()
    }

    pub fn coherence_factors(self, e: ScaledEnergy) -> CoherenceFactors {
        let (u2, v2) = self.coherence_squares(e.0);
        CoherenceFactors {
            u: u2.sqrt(),
            v: v2.sqrt(),
        }
    }

    /// `(u², v²)` with `v²` evaluated as `n̄²/(2r(r + E))` so that it keeps its
    /// relative precision deep in the free-particle regime.
    fn coherence_squares(self, e: f64) -> (f64, f64) {
        if e <= 0.0 {
            return (0.5, 0.5);
        }
        if self.nbar == 0.0 {
            return (1.0, 0.0);
        }
        let r = e.hypot(self.nbar);
        let v2 = self.nbar * self.nbar / (2.0 * r * (r + e));
        (1.0 - v2, v2)
    }

    /// `1/sqrt(1 + (n̄/E)²)`; zero at `E = 0`.
    pub fn chi_weight(self, e: ScaledEnergy) -> f64 {
        self.chi(e.0)
    }

    pub(crate) fn chi(self, e: f64) -> f64 {
        if e <= 0.0 {
            return 0.0;
        }
        if self.nbar == 0.0 {
            return 1.0;
        }
        e / e.hypot(self.nbar)
    }

    pub fn quasi_particle(self, e: f64) -> QuasiParticle {
        let (u2, v2) = self.coherence_squares(e);
        QuasiParticle {
            energy: e,
            momentum: self.momentum(e),
            u: u2.sqrt(),
            v: v2.sqrt(),
            chi: self.chi(e),
        }
    }

    /// Density-of-states shape with the constant prefactor dropped.
    pub fn dos_shape(self, e: ScaledEnergy, form: DosForm) -> f64 {
        let e = e.0;
        if e <= 0.0 {
            return 0.0;
        }
        match form {
            DosForm::DerivedFromDispersion => self.momentum(e) * self.chi(e),
            DosForm::AsPrinted => {
                let n = self.nbar;
                if n == 0.0 {
                    // x → ∞ limit of the printed form is n̄/sqrt(2E) → 0
                    return 0.0;
                }
                let x = e / n;
                let r = x.hypot(1.0);
                (e / n.sqrt()) * (1.0 / ((r + x) * (1.0 + x * x))).sqrt()
            }
        }
    }

    /// `T(E1, E2, E3, E4)` for the four quasi-particle energies.
    pub fn kernel_t(self, energies: [f64; 4], form: KernelForm) -> f64 {
        let q = energies.map(|e| self.quasi_particle(e));
        kernel_t(&q, form)
    }

    /// `S(E1, E2, E3)` for the three quasi-particle energies.
    pub fn kernel_s(self, energies: [f64; 3], form: KernelForm) -> f64 {
        let q = energies.map(|e| self.quasi_particle(e));
        kernel_s(&q, form)
    }

    /// `ζ(E1, E2, E3, E4)`: momentum window times `χ2 χ3 χ4`.
    pub fn zeta(self, energies: [f64; 4]) -> f64 {
        let q = energies.map(|e| self.quasi_particle(e));
        zeta(&q, WindowRule::Clamped)
    }
}

/// Five-term printed `T` on precomputed quasi-particles.
pub fn kernel_t(q: &[QuasiParticle; 4], form: KernelForm) -> f64 {
    match form {
        KernelForm::AsPrinted => t_printed(q[0], q[1], q[2], q[3]),
        KernelForm::SymmetrizedLiterature => {
            let [a, b, c, d] = *q;
            0.25 * (t_printed(a, b, c, d)
                + t_printed(b, a, c, d)
                + t_printed(a, b, d, c)
                + t_printed(b, a, d, c))
        }
    }
}

fn t_printed(a: QuasiParticle, b: QuasiParticle, c: QuasiParticle, d: QuasiParticle) -> f64 {
    let s = a.u * b.u * c.u * d.u
        + a.v * b.u * c.u * d.u
        + a.v * b.u * c.u * d.v
        + a.v * b.v * c.v * d.u
        + a.u * b.v * c.v * d.v;
    s * s
}

/// Six-term printed `S` on precomputed quasi-particles.
pub fn kernel_s(q: &[QuasiParticle; 3], form: KernelForm) -> f64 {
    match form {
        KernelForm::AsPrinted => s_printed(q[0], q[1], q[2]),
        KernelForm::SymmetrizedLiterature => {
            0.5 * (s_printed(q[0], q[1], q[2]) + s_printed(q[0], q[2], q[1]))
        }
    }
}

fn s_printed(a: QuasiParticle, b: QuasiParticle, c: QuasiParticle) -> f64 {
    let s = a.u * b.u * c.u + a.v * b.v * c.v + a.u * b.v * c.v + a.v * b.u * c.v
        - a.u * b.v * c.u
        - a.v * b.u * c.u;
    s * s
}

/// Momentum window `min(p1+p3, p2+p4) − max(|p1−p3|, |p2−p4|)` clamped at zero,
/// times `χ2 χ3 χ4`.
pub fn zeta(q: &[QuasiParticle; 4], rule: WindowRule) -> f64 {
    let [p1, p2, p3, p4] = q.map(|x| x.momentum);
    let upper = (p1 + p3).min(p2 + p4);
    let lower = (p1 - p3).abs().max((p2 - p4).abs());
    let window = (upper - lower).max(0.0);
    let window = match rule {
        WindowRule::Clamped => window,
        WindowRule::Corrupted => 0.5 * window,
    };
    window * q[1].chi * q[2].chi * q[3].chi
}

/// Squared particle projection `μ = 1/2 + 1/(2 sqrt(1 + (E0/E)²))`.
pub fn particle_weight(e: ScaledEnergy, e0: ScaledEnergy) -> f64 {
    let (e, e0) = (e.0, e0.0);
    if e0 <= 0.0 {
        return 1.0;
    }
    if e <= 0.0 {
        return 0.5;
    }
    0.5 + 0.5 * e / e.hypot(e0)
}

/// Bose-Einstein occupation at zero chemical potential, `1/(e^E − 1)`.
/// `E = 0` is a pole and returns infinity.
pub fn bose_einstein(e: ScaledEnergy) -> f64 {
    bose(e.0)
}

#[inline]
pub(crate) fn bose(e: f64) -> f64 {
    1.0 / e.exp_m1()
}

/// `1 + f_BE(E) = 1/(1 − e^{−E})`, evaluated without cancellation.
#[inline]
pub(crate) fn bose_plus_one(e: f64) -> f64 {
    -1.0 / (-e).exp_m1()
}

/// A collision-integral prefactor with its meaning spelled out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prefactor {
    pub value: f64,
    pub description: String,
}

/// Absolute scales of the NN and NC collision operators. They cancel from
/// every effective-scattering ratio and only matter for absolute rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrefactorConstants {
    /// `γ = 8 a0² / ((2π)³ ħ³ m²)`, SI.
    pub gamma: Prefactor,
    /// `ξ = 8 a0² n_c / m²`, SI.
    pub xi: Prefactor,
    /// `ξ` after scaling, `8 a0 n̄ / (4π m ħ²)`, SI.
    pub xi_scaled: Prefactor,
}

impl PrefactorConstants {
    /// Mass in kg, `a0` in m, condensate density in m⁻³, `nbar` dimensionless.
    pub fn new(mass: f64, a0: f64, condensate_density: f64, nbar: f64) -> Self {
        let gamma = 8.0 * a0 * a0 / ((2.0 * std::f64::consts::PI).powi(3) * HBAR.powi(3) * mass * mass);
        let xi = 8.0 * a0 * a0 * condensate_density / (mass * mass);
        let xi_scaled = 8.0 * a0 * nbar / (mass * 4.0 * std::f64::consts::PI * HBAR * HBAR);
        PrefactorConstants {
            gamma: Prefactor {
                value: gamma,
                description: "8 a0^2 / ((2 pi)^3 hbar^3 m^2), NN collision prefactor".into(),
            },
            xi: Prefactor {
                value: xi,
                description: "8 a0^2 n_c / m^2, NC collision prefactor".into(),
            },
            xi_scaled: Prefactor {
                value: xi_scaled,
                description: "8 a0 nbar / (4 pi m hbar^2), NC prefactor in scaled variables".into(),
            },
        }
    }
}
