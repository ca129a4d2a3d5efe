//! Effective scattering lengths `α_T(E)`, `α_S(E)` and the population
//! averages built on them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bogoliubov::{kernel_s, kernel_t, CondensateScale, DosForm, KernelForm, ScaledEnergy};
use crate::collision::{nc_integrate, nn_integrate, w_parts, Branch, KernelMode};
use crate::distribution::IsotropicDistribution;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_from_zero, integrate_from_zero_coupled, QuadResult, QuadratureSpec};

/// Weighting of the NC variational ratio.
///
/// `Consistent` keeps the `χ2 χ3` factors of the NC collision operator in both
/// numerator and denominator. `AsPrinted` drops them from the numerator only,
/// which leaves non-integrable `1/E` endpoints; it is kept for comparison and
/// normally reports [`Error::Divergent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum NcWeighting {
    #[default]
    Consistent,
    AsPrinted,
}

impl NcWeighting {
    pub fn label(self) -> &'static str {
        match self {
            NcWeighting::Consistent => "consistent",
            NcWeighting::AsPrinted => "as-printed",
        }
    }
}

fn require_condensate(n: CondensateScale) -> Result<()> {
    if n.nbar() > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput("effective scattering lengths need nbar > 0".into()))
    }
}

fn require_energy(e: f64) -> Result<()> {
    if e > 0.0 && e.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("E1 must be positive and finite, got {e}")))
    }
}

/// `[∫∫ T M′, ∫∫ M′]` over the NN shell, with `M′ = ζ f2 (1+f3)(1+f4)` at
/// equilibrium. The loss integral `Q^l` is these times `f1 / p1`.
pub(crate) fn nn_loss_moments(e1: f64, n: CondensateScale, form: KernelForm, spec: &QuadratureSpec) -> Result<[f64; 2]> {
    let eq = IsotropicDistribution::bose_einstein();
    let (v, _) = nn_integrate(e1, n, spec, &[], |q| {
        let (f2, _) = eq.occupation(q[1].energy);
        let (_, g3) = eq.occupation(q[2].energy);
        let (_, g4) = eq.occupation(q[3].energy);
        let w = f2 * g3 * g4;
        [kernel_t(q, form) * w, w]
    })?;
    Ok(v)
}

fn nc_loss_moments(
    e1: f64,
    n: CondensateScale,
    form: KernelForm,
    weighting: NcWeighting,
    spec: &QuadratureSpec,
) -> Result<[f64; 2]> {
    let eq = IsotropicDistribution::bose_einstein();
    let (v, _) = nc_integrate(e1, n, spec, &[], |branch, q| {
        let (f2, g2) = eq.occupation(q[1].energy);
        let (_, g3) = eq.occupation(q[2].energy);
        let m = match branch {
            Branch::Plus => 2.0 * f2 * g3,
            Branch::Minus => g2 * g3,
        };
        let chi = q[1].chi * q[2].chi;
        let s = kernel_s(q, form);
        match weighting {
            NcWeighting::Consistent => [s * m * chi, m * chi],
            NcWeighting::AsPrinted => [s * m, m * chi],
        }
    })?;
    Ok(v)
}

/// Effective NN scattering length in units of `a₀`: the positive root of
/// `∫∫ T M′ / ∫∫ M′`.
pub fn alpha_t(e1: ScaledEnergy, n: CondensateScale, form: KernelForm, spec: &QuadratureSpec) -> Result<f64> {
    require_energy(e1.0)?;
    require_condensate(n)?;
    spec.validate()?;
    let [num, den] = nn_loss_moments(e1.0, n, form, spec)?;
    Ok((num / den).sqrt())
}

/// Effective NC scattering length in units of `a₀`.
pub fn alpha_s(
    e1: ScaledEnergy,
    n: CondensateScale,
    form: KernelForm,
    weighting: NcWeighting,
    spec: &QuadratureSpec,
) -> Result<f64> {
    require_energy(e1.0)?;
    require_condensate(n)?;
    spec.validate()?;
    let [num, den] = nc_loss_moments(e1.0, n, form, weighting, spec)?;
    Ok(num / den)
}

/// Log-spaced energy grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl EnergyGrid {
    /// 200 points over `[1e-4 n̄, 1e3]`.
    pub fn default_for(n: CondensateScale) -> Self {
        EnergyGrid { lo: 1e-4 * n.nbar(), hi: 1e3, points: 200 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite()) || self.points < 2 {
            return Err(Error::InvalidInput(format!(
                "energy grid needs 0 < lo < hi and at least two points, got [{}, {}] x {}",
                self.lo, self.hi, self.points
            )));
        }
        Ok(())
    }

    pub fn energies(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let m = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| match i {
                0 => self.lo,
                _ if i + 1 == self.points => self.hi,
                _ => (a + (b - a) * i as f64 / m).exp(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    /// `α_T`, with the kernel and constant loss integrals kept per point.
    NormalNormal,
    /// `α_S`.
    NormalCondensate(NcWeighting),
}

/// An effective scattering length sampled on an energy grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaCurve {
    pub nbar: f64,
    pub kind: CurveKind,
    pub form: KernelForm,
    pub quad: QuadratureSpec,
    pub energies: Vec<f64>,
    pub alpha: Vec<f64>,
    /// Numerator and denominator integrals behind each `alpha` value.
    pub moments: Vec<[f64; 2]>,
}

impl AlphaCurve {
    pub fn alpha_t(n: CondensateScale, form: KernelForm, grid: &EnergyGrid, spec: &QuadratureSpec) -> Result<Self> {
        require_condensate(n)?;
        grid.validate()?;
        spec.validate()?;
        let energies = grid.energies();
        let moments = energies
            .par_iter()
            .map(|&e| nn_loss_moments(e, n, form, spec))
            .collect::<Result<Vec<_>>>()?;
        let alpha = moments.iter().map(|[a, b]| (a / b).sqrt()).collect();
        Ok(AlphaCurve {
            nbar: n.nbar(),
            kind: CurveKind::NormalNormal,
            form,
            quad: spec.clone(),
            energies,
            alpha,
            moments,
        })
    }

    pub fn alpha_s(
        n: CondensateScale,
        form: KernelForm,
        weighting: NcWeighting,
        grid: &EnergyGrid,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        require_condensate(n)?;
        grid.validate()?;
        spec.validate()?;
        let energies = grid.energies();
        let moments = energies
            .par_iter()
            .map(|&e| nc_loss_moments(e, n, form, weighting, spec))
            .collect::<Result<Vec<_>>>()?;
        let alpha = moments.iter().map(|[a, b]| a / b).collect();
        Ok(AlphaCurve {
            nbar: n.nbar(),
            kind: CurveKind::NormalCondensate(weighting),
            form,
            quad: spec.clone(),
            energies,
            alpha,
            moments,
        })
    }

    pub fn condensate(&self) -> CondensateScale {
        CondensateScale::new(self.nbar).expect("curve holds a validated nbar")
    }

    /// Linear interpolation in `ln E`, constant beyond the grid ends.
    pub fn interpolate(&self, e: f64) -> f64 {
        let xs = &self.energies;
        let n = xs.len();
        if e <= xs[0] {
            return self.alpha[0];
        }
        if e >= xs[n - 1] {
            return self.alpha[n - 1];
        }
        let k = xs.partition_point(|&x| x <= e) - 1;
        let w = (e / xs[k]).ln() / (xs[k + 1] / xs[k]).ln();
        self.alpha[k] + w * (self.alpha[k + 1] - self.alpha[k])
    }

    /// Index of the grid minimum of `alpha`.
    pub fn argmin(&self) -> usize {
        (0..self.alpha.len()).min_by(|&a, &b| self.alpha[a].total_cmp(&self.alpha[b])).unwrap_or(0)
    }

    fn require_kind(&self, nn: bool) -> Result<()> {
        match (self.kind, nn) {
            (CurveKind::NormalNormal, true) | (CurveKind::NormalCondensate(_), false) => Ok(()),
            _ => Err(Error::InvalidInput(format!("wrong curve kind {:?} for this quantity", self.kind))),
        }
    }
}

/// `f_BE(E) ρ(E)`, the equilibrium population per unit energy.
fn population_density(n: CondensateScale, dos: DosForm, e: f64) -> f64 {
    n.dos_shape(ScaledEnergy(e), dos) / e.exp_m1()
}

fn population_integral<F>(n: CondensateScale, dos: DosForm, upper: f64, breaks: &[f64], spec: &QuadratureSpec, g: F) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let h = |e: f64| Ok([g(e) * population_density(n, dos, e)]);
    let (v, _) = integrate_from_zero(&h, upper.min(spec.e_max), breaks, spec.log_split_for(n.nbar()), spec, false)?;
    Ok(v[0])
}

/// `∫ g(E) ω(E)² Q^l[T] Q^l[1] dE / ∫ ω(E)² Q^l[1]² dE` on the curve grid
/// (trapezoid rule in `ln E`), with `Q^l` recovered from the stored moments.
fn sigma0_weighted<W: Fn(f64) -> f64>(curve: &AlphaCurve, weight: W) -> f64 {
    let xs = &curve.energies;
    let terms: Vec<(f64, f64)> = xs
        .iter()
        .zip(&curve.moments)
        .map(|(&e, &[kern, one])| {
            let w = weight(e);
            let w2 = w * w * e;
            (w2 * kern * one, w2 * one * one)
        })
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..xs.len() - 1 {
        let h = (xs[k + 1] / xs[k]).ln();
        num += 0.5 * h * (terms[k].0 + terms[k + 1].0);
        den += 0.5 * h * (terms[k].1 + terms[k + 1].1);
    }
    num / den
}

/// Global constant kernel `σ₀`: the `L²` projection of `α_T²` weighted by
/// `(Q^l[1] ρ)²`.
pub fn sigma0_t(curve: &AlphaCurve, dos: DosForm) -> Result<f64> {
    curve.require_kind(true)?;
    let n = curve.condensate();
    Ok(sigma0_weighted(curve, |e| {
        let q = n.quasi_particle(e);
        n.dos_shape(ScaledEnergy(e), dos) / (e.exp_m1() * q.momentum)
    }))
}

/// Upper end `E*` of the region `α_T ≥ threshold`, located on the grid and
/// refined by bisection in `ln E` on freshly computed `α_T`.
pub fn transition_energy(curve: &AlphaCurve, threshold: f64) -> Result<f64> {
    curve.require_kind(true)?;
    if !(threshold > 1.0) {
        return Err(Error::InvalidInput(format!("threshold must exceed 1, got {threshold}")));
    }
    let k = match curve.alpha.iter().position(|&a| a < threshold) {
        Some(0) => return Err(Error::EmptyRegion { threshold }),
        Some(k) => k,
        None => return Ok(*curve.energies.last().unwrap()),
    };
    let n = curve.condensate();
    let (mut lo, mut hi) = (curve.energies[k - 1], curve.energies[k]);
    while (hi / lo).ln() > 1e-6 {
        let mid = (lo * hi).sqrt();
        if alpha_t(ScaledEnergy(mid), n, curve.form, &curve.quad)? >= threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

fn total_population(n: CondensateScale, dos: DosForm, spec: &QuadratureSpec) -> Result<f64> {
    population_integral(n, dos, spec.e_max, &[n.nbar(), 1.0], spec, |_| 1.0)
}

/// Fraction of the thermal population with `α_T ≥ threshold`.
pub fn low_energy_fraction(curve: &AlphaCurve, threshold: f64, dos: DosForm) -> Result<f64> {
    let e_star = transition_energy(curve, threshold)?;
    low_energy_fraction_below(curve, e_star, dos)
}

fn low_energy_fraction_below(curve: &AlphaCurve, e_star: f64, dos: DosForm) -> Result<f64> {
    let n = curve.condensate();
    let spec = &curve.quad;
    let low = population_integral(n, dos, e_star, &[n.nbar()], spec, |_| 1.0)?;
    Ok((low / total_population(n, dos, spec)?).clamp(0.0, 1.0))
}

/// Mean `α_T` over the population with `α_T ≥ threshold`.
pub fn mean_alpha_low(curve: &AlphaCurve, threshold: f64, dos: DosForm) -> Result<f64> {
    let e_star = transition_energy(curve, threshold)?;
    mean_alpha_below(curve, e_star, dos)
}

fn mean_alpha_below(curve: &AlphaCurve, e_star: f64, dos: DosForm) -> Result<f64> {
    let n = curve.condensate();
    let spec = &curve.quad;
    let num = population_integral(n, dos, e_star, &curve.energies, spec, |e| curve.interpolate(e))?;
    let den = population_integral(n, dos, e_star, &curve.energies, spec, |_| 1.0)?;
    Ok(num / den)
}

/// Population-weighted mean of a curve over all energies.
pub fn mean_alpha(curve: &AlphaCurve, dos: DosForm) -> Result<f64> {
    let n = curve.condensate();
    let spec = &curve.quad;
    let num = population_integral(n, dos, spec.e_max, &curve.energies, spec, |e| curve.interpolate(e))?;
    Ok(num / total_population(n, dos, spec)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationReport {
    pub nbar: f64,
    pub threshold: f64,
    pub dos: DosForm,
    /// `E*`, or `None` when the region is empty.
    pub transition_energy: Option<f64>,
    pub n_l: f64,
    /// `a_eff,l / a₀`, `None` when `n_l = 0`.
    pub a_eff_low: Option<f64>,
    pub mean_alpha_t: f64,
    pub mean_alpha_s: f64,
}

/// Collects `n_l`, `a_eff,l` and both population means. An empty low-energy
/// region is reported as `n_l = 0` rather than an error.
pub fn population_report(
    t_curve: &AlphaCurve,
    s_curve: &AlphaCurve,
    threshold: f64,
    dos: DosForm,
) -> Result<PopulationReport> {
    t_curve.require_kind(true)?;
    s_curve.require_kind(false)?;
    if t_curve.nbar != s_curve.nbar {
        return Err(Error::InvalidInput("alpha_T and alpha_S curves are for different nbar".into()));
    }
    let (e_star, n_l, a_eff) = match transition_energy(t_curve, threshold) {
        Ok(e) => (
            Some(e),
            low_energy_fraction_below(t_curve, e, dos)?,
            Some(mean_alpha_below(t_curve, e, dos)?),
        ),
        Err(Error::EmptyRegion { .. }) => (None, 0.0, None),
        Err(e) => return Err(e),
    };
    Ok(PopulationReport {
        nbar: t_curve.nbar,
        threshold,
        dos,
        transition_energy: e_star,
        n_l,
        a_eff_low: a_eff,
        mean_alpha_t: mean_alpha(t_curve, dos)?,
        mean_alpha_s: mean_alpha(s_curve, dos)?,
    })
}

/// `dn_c/dt` in scaled units: `−2 ∫ W[S, f](E) ρ(E) dE` with the shell measure
/// `ρ = p χ` of the Bogoliubov dispersion. Multiply by the NC prefactor of
/// [`PrefactorConstants`](crate::PrefactorConstants) for absolute units.
pub fn condensate_growth_rate(
    f: &IsotropicDistribution,
    n: CondensateScale,
    form: KernelForm,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    require_condensate(n)?;
    spec.validate()?;
    let kernel = KernelMode::FullS(form);
    let inner = spec.inner();
    let g = |e: f64| -> Result<[f64; 2]> {
        let (w, _) = w_parts(e, f, n, &kernel, &inner)?;
        let rho = n.dos_shape(ScaledEnergy(e), DosForm::DerivedFromDispersion);
        Ok([-2.0 * w[2] * rho, 2.0 * w[1] * rho])
    };
    let split = spec.log_split_for(n.nbar());
    let (v, e) = integrate_from_zero_coupled(&g, spec.e_max, &[n.nbar(), 1.0], split, spec, true, &[(0, 1)])?;
    Ok(QuadResult { value: v[0], error: e[0] })
}
