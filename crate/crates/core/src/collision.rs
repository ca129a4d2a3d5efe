//! Isotropic reductions of the NN operator `Q[T, f]` and the NC operator
//! `W[S, f] = W₊ + W₋`.
//!
//! The energy delta functions are eliminated analytically: `Q` becomes a 2D
//! integral over `(E2, E3)` with `E4 = E1 + E2 − E3`, and each branch of `W`
//! a 1D integral over `E2` with `E3 = E1 ± E2`. Results are in scaled units
//! with the `1/p1` factor included and `γ (k_B T)²` or `2π m² ξ` left out
//! (see [`PrefactorConstants`](crate::PrefactorConstants)).

use std::fmt;
use std::sync::Arc;

use crate::bogoliubov::{kernel_s, kernel_t, zeta, CondensateScale, KernelForm, QuasiParticle};
use crate::distribution::IsotropicDistribution;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_from_zero_coupled, QuadResult, QuadratureSpec};

/// Scattering kernel used inside a collision integral.
#[derive(Clone)]
pub enum KernelMode {
    /// The full NN kernel `T(E1, E2, E3, E4)`.
    FullT(KernelForm),
    /// The full NC kernel `S(E1, E2, E3)`.
    FullS(KernelForm),
    /// Hard-sphere scattering with the bare length.
    ConstantOne,
    /// A single function of the incoming energy `E1`.
    Sigma(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl KernelMode {
    pub fn sigma<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        KernelMode::Sigma(Arc::new(f))
    }
}

impl fmt::Debug for KernelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelMode::FullT(form) => write!(f, "FullT({form:?})"),
            KernelMode::FullS(form) => write!(f, "FullS({form:?})"),
            KernelMode::ConstantOne => write!(f, "ConstantOne"),
            KernelMode::Sigma(_) => write!(f, "Sigma(..)"),
        }
    }
}

/// Which part of the collision integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollisionParts {
    /// In-scattering only.
    GainOnly,
    /// Out-scattering only, returned as a positive magnitude.
    LossOnly,
    /// Gain minus loss.
    Both,
}

impl CollisionParts {
    /// Picks from integrated `[gain, loss, net]`.
    fn pick(self, v: [f64; 3], e: [f64; 3]) -> (f64, f64) {
        let i = match self {
            CollisionParts::GainOnly => 0,
            CollisionParts::LossOnly => 1,
            CollisionParts::Both => 2,
        };
        (v[i], e[i])
    }
}

/// The net component `[2]` is refined only down to the rounding level of the loss `[1]`.
const NET_OF_LOSS: &[(usize, usize)] = &[(2, 1)];

/// `gain − loss` written as `loss (e^{Λ} − 1)` with `Λ = ln(gain/loss)` built
/// from occupation log-ratios. At equilibrium `Λ` reduces to an energy
/// difference that is zero up to the rounding of the energies themselves,
/// so detailed balance holds far below the rounding of the products.
#[inline]
fn net(gain: f64, loss: f64, log_gain_over_loss: f64) -> f64 {
    if loss > 0.0 && log_gain_over_loss.is_finite() {
        loss * log_gain_over_loss.exp_m1()
    } else {
        gain - loss
    }
}

/// `∫∫ g(q1, q2, q3, q4) ζ dE3 dE2` over `E2 ∈ (0, e_max)`, `E3 ∈ (0, E1 + E2)`.
///
/// The inner range is split at its midpoint and each half is integrated
/// from its singular end (`E3 → 0` or `E4 → 0`).
pub(crate) fn nn_integrate<const N: usize, G>(
    e1: f64,
    n: CondensateScale,
    spec: &QuadratureSpec,
    coupled: &[(usize, usize)],
    g: G,
) -> Result<([f64; N], [f64; N])>
where
    G: Fn(&[QuasiParticle; 4]) -> [f64; N] + Sync,
{
    let nbar = n.nbar();
    let q1 = n.quasi_particle(e1);
    let split = spec.log_split_for(nbar);
    let inner_spec = spec.inner();
    let window = spec.window;

    let outer = |e2: f64| -> Result<[f64; N]> {
        let q2 = n.quasi_particle(e2);
        let total = e1 + e2;
        let half = 0.5 * total;
        let breaks = [e1, e2, nbar];
        let mut acc = [0.0; N];
        for mirrored in [false, true] {
            let inner = |x: f64| -> Result<[f64; N]> {
                let (e3, e4) = if mirrored { (total - x, x) } else { (x, total - x) };
                let q = [q1, q2, n.quasi_particle(e3), n.quasi_particle(e4)];
                let z = zeta(&q, window);
                if z == 0.0 {
                    return Ok([0.0; N]);
                }
                let mut v = g(&q);
                for c in v.iter_mut() {
                    *c *= z;
                }
                Ok(v)
            };
            let (v, _) = integrate_from_zero_coupled(&inner, half, &breaks, split, &inner_spec, false, coupled)?;
            for i in 0..N {
                acc[i] += v[i];
            }
        }
        Ok(acc)
    };
    integrate_from_zero_coupled(&outer, spec.e_max, &[e1, nbar, 1.0], split, spec, true, coupled)
}

/// Which NC branch a `W` integrand is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Branch {
    /// `E3 = E1 + E2`, `E2 ∈ (0, ∞)`.
    Plus,
    /// `E3 = E1 − E2`, `E2 ∈ (0, E1)`.
    Minus,
}

/// `Σ_± ∫ g(branch, q1, q2, q3) dE2` with the branch kinematics applied.
/// Weights and `χ` factors are the integrand's responsibility.
pub(crate) fn nc_integrate<const N: usize, G>(
    e1: f64,
    n: CondensateScale,
    spec: &QuadratureSpec,
    coupled: &[(usize, usize)],
    g: G,
) -> Result<([f64; N], [f64; N])>
where
    G: Fn(Branch, &[QuasiParticle; 3]) -> [f64; N] + Sync,
{
    let nbar = n.nbar();
    let q1 = n.quasi_particle(e1);
    let split = spec.log_split_for(nbar);

    let plus = |e2: f64| -> Result<[f64; N]> {
        let q = [q1, n.quasi_particle(e2), n.quasi_particle(e1 + e2)];
        Ok(g(Branch::Plus, &q))
    };
    let (mut total, mut err) = integrate_from_zero_coupled(&plus, spec.e_max, &[e1, nbar, 1.0], split, spec, false, coupled)?;

    let half = 0.5 * e1;
    for mirrored in [false, true] {
        let minus = |x: f64| -> Result<[f64; N]> {
            let (e2, e3) = if mirrored { (e1 - x, x) } else { (x, e1 - x) };
            let q = [q1, n.quasi_particle(e2), n.quasi_particle(e3)];
            Ok(g(Branch::Minus, &q))
        };
        let (v, e) = integrate_from_zero_coupled(&minus, half, &[nbar], split, spec, false, coupled)?;
        for i in 0..N {
            total[i] += v[i];
            err[i] += e[i];
        }
    }
    Ok((total, err))
}

fn check_energy(e1: f64) -> Result<()> {
    if !(e1 > 0.0) || !e1.is_finite() {
        return Err(Error::InvalidInput(format!("E1 must be positive and finite, got {e1}")));
    }
    Ok(())
}

/// NN collision rate `Q[kernel, f](E1)` in scaled units.
pub fn q_collision(
    e1: f64,
    f: &IsotropicDistribution,
    n: CondensateScale,
    kernel: &KernelMode,
    parts: CollisionParts,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    check_energy(e1)?;
    spec.validate()?;
    if matches!(kernel, KernelMode::FullS(_)) {
        return Err(Error::InvalidInput("Q takes the NN kernel T, not S".into()));
    }
    let p1 = n.quasi_particle(e1).momentum;
    let (f1, g1) = f.occupation(e1);
    let sigma1 = match kernel {
        KernelMode::Sigma(s) => s(e1),
        _ => 1.0,
    };
    let l1 = f.log_ratio(e1);
    let (v, e) = nn_integrate(e1, n, spec, NET_OF_LOSS, |q| {
        let (f2, g2) = f.occupation(q[1].energy);
        let (f3, g3) = f.occupation(q[2].energy);
        let (f4, g4) = f.occupation(q[3].energy);
        let k = match kernel {
            KernelMode::FullT(form) => kernel_t(q, *form),
            _ => 1.0,
        };
        let gain = g1 * g2 * f3 * f4 * k;
        let loss = f1 * f2 * g3 * g4 * k;
        let log = (l1 + f.log_ratio(q[1].energy)) - f.log_ratio(q[2].energy) - f.log_ratio(q[3].energy);
        [gain, loss, net(gain, loss, log)]
    })?;
    let (value, error) = parts.pick(v, e);
    Ok(QuadResult {
        value: sigma1 * value / p1,
        error: sigma1.abs() * error / p1,
    })
}

/// NC collision rate `W[kernel, f](E1) = W₊ + W₋` in scaled units.
/// Vanishes identically without a condensate.
pub fn w_collision(
    e1: f64,
    f: &IsotropicDistribution,
    n: CondensateScale,
    kernel: &KernelMode,
    parts: CollisionParts,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    check_energy(e1)?;
    spec.validate()?;
    let (v, e) = w_parts(e1, f, n, kernel, spec)?;
    let (value, error) = parts.pick(v, e);
    Ok(QuadResult { value, error })
}

/// `[gain, loss, net]` of `W` and their error estimates, `1/p1` included.
pub(crate) fn w_parts(
    e1: f64,
    f: &IsotropicDistribution,
    n: CondensateScale,
    kernel: &KernelMode,
    spec: &QuadratureSpec,
) -> Result<([f64; 3], [f64; 3])> {
    if matches!(kernel, KernelMode::FullT(_)) {
        return Err(Error::InvalidInput("W takes the NC kernel S, not T".into()));
    }
    if n.nbar() == 0.0 {
        return Ok(([0.0; 3], [0.0; 3]));
    }
    let p1 = n.quasi_particle(e1).momentum;
    let (f1, g1) = f.occupation(e1);
    let l1 = f.log_ratio(e1);
    let sigma1 = match kernel {
        KernelMode::Sigma(s) => s(e1),
        _ => 1.0,
    };
    let (v, e) = nc_integrate(e1, n, spec, NET_OF_LOSS, |branch, q| {
        let (f2, g2) = f.occupation(q[1].energy);
        let (f3, g3) = f.occupation(q[2].energy);
        let k = match kernel {
            KernelMode::FullS(form) => kernel_s(q, *form),
            _ => 1.0,
        };
        let w = k * q[1].chi * q[2].chi;
        let (l2, l3) = (f.log_ratio(q[1].energy), f.log_ratio(q[2].energy));
        let (gain, loss, log) = match branch {
            // θ⁺ = 1: (1+f1)(1+f2)f3 − f1 f2 (1+f3), weight θ⁺ + 1 = 2
            Branch::Plus => (2.0 * w * g1 * g2 * f3, 2.0 * w * f1 * f2 * g3, (l1 + l2) - l3),
            // θ⁻ = 0: (1+f1) f2 f3 − f1 (1+f2)(1+f3), weight 1
            Branch::Minus => (w * g1 * f2 * f3, w * f1 * g2 * g3, (l1 - l2) - l3),
        };
        [gain, loss, net(gain, loss, log)]
    })?;
    let c = sigma1 / p1;
    Ok((v.map(|x| c * x), e.map(|x| c.abs() * x)))
}

/// `M′ = ζ(E1, E2, E3, E4) / ((e^{E2} − 1)(1 − e^{−E3})(1 − e^{−E4}))`
/// with `E4 = E1 + E2 − E3`.
pub fn m_prime(e1: f64, e2: f64, e3: f64, n: CondensateScale) -> Result<f64> {
    let e4 = e1 + e2 - e3;
    if !(e2 > 0.0 && e3 > 0.0 && e4 > 0.0) {
        return Err(Error::InvalidInput(format!(
            "M' needs E2 > 0 and 0 < E3 < E1 + E2, got ({e1}, {e2}, {e3})"
        )));
    }
    let q = [e1, e2, e3, e4].map(|e| n.quasi_particle(e));
    let z = zeta(&q, Default::default());
    Ok(z / (e2.exp_m1() * (-(-e3).exp_m1()) * (-(-e4).exp_m1())))
}
