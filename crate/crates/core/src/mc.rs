//! Monte Carlo cross-checks of the analytic angular reductions.
//!
//! Momentum deltas are replaced by Gaussians of width `ε`. One direction is
//! integrated in closed form against the smoothed `δ³`, the rest are sampled
//! uniformly, and every sample is Richardson-extrapolated from `ε` and `ε/2`
//! so the `O(ε²)` smoothing bias cancels. Samples are drawn in a fixed number
//! of batches, each from its own ChaCha8 stream, and combined in batch order:
//! a given seed gives bit-identical estimates for any thread count.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bogoliubov::{bose, bose_plus_one, CondensateScale, ScaledEnergy, ScaledMomentum};
use crate::error::{Error, Result};

const BATCHES: u64 = 64;
/// Relative standard error above which an estimate is rejected.
pub const MAX_REL_ERROR: f64 = 0.05;
/// Configurations whose support edge lies within this many `ε` are refused.
const EDGE_WIDTHS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McSpec {
    pub samples: usize,
    /// Smoothing width; `None` picks 1% of the test point's scale.
    pub epsilon: Option<f64>,
    pub seed: u64,
}

impl Default for McSpec {
    fn default() -> Self {
        McSpec { samples: 1_000_000, epsilon: None, seed: 42 }
    }
}

impl McSpec {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 10_000 {
            return Err(Error::InvalidInput(format!("need at least 1e4 samples, got {}", self.samples)));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::InvalidInput(format!("epsilon must be positive, got {e}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

impl McEstimate {
    /// `|value − target| ≤ k σ`.
    pub fn within_sigmas(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }

    pub fn rel_error(&self) -> f64 {
        self.std_error / self.value.abs()
    }
}

/// Mean and standard error of `sample(rng)` over `spec.samples` draws.
fn run<F>(spec: &McSpec, sample: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let total = spec.samples as u64;
    let sums: Vec<(f64, f64)> = (0..BATCHES)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(b);
            let count = total / BATCHES + u64::from(b < total % BATCHES);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let x = sample(&mut rng);
                s += x;
                s2 += x * x;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = sums.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = total as f64;
    let mean = s / n;
    let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    McEstimate { value: mean, std_error: (var / n).sqrt() }
}

fn unit_vector(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `∫ dp̂ δ_ε³(k − p p̂)` for `|k| = k`.
fn shell_average(k: f64, p: f64, eps: f64) -> f64 {
    let s2 = 2.0 * eps * eps;
    let d = (-(k - p).powi(2) / s2).exp() - (-(k + p).powi(2) / s2).exp();
    if d == 0.0 {
        return 0.0;
    }
    d / ((2.0 * PI).sqrt() * eps * k.max(1e-300) * p)
}

fn richardson(k: f64, p: f64, eps: f64) -> f64 {
    (4.0 * shell_average(k, p, 0.5 * eps) - shell_average(k, p, eps)) / 3.0
}

fn check_momenta(p: &[f64]) -> Result<()> {
    if p.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidInput(format!("momenta must be positive, got {p:?}")));
    }
    Ok(())
}

/// Raw (unclamped) overlap window of the four-momentum shell.
fn raw_window(p: [f64; 4]) -> f64 {
    (p[0] + p[2]).min(p[1] + p[3]) - (p[0] - p[2]).abs().max((p[1] - p[3]).abs())
}

/// `∫ dp̂2 dp̂3 dp̂4 δ³(p1 + p2 − p3 − p4)` with the direction of `p1` fixed.
/// The analytic value is `4π² window / (p1 p2 p3 p4)`.
pub fn mc_angular_window(p: [ScaledMomentum; 4], spec: &McSpec) -> Result<McEstimate> {
    spec.validate()?;
    let p = p.map(|x| x.0);
    check_momenta(&p)?;
    let eps = spec.epsilon.unwrap_or(1e-2 * p.iter().cloned().fold(f64::INFINITY, f64::min));
    let w = raw_window(p);
    if w.abs() < EDGE_WIDTHS * eps {
        return Err(Error::DegenerateMomenta(format!("{p:?}: window {w:e} within {EDGE_WIDTHS} eps of zero")));
    }
    let outer = (4.0 * PI) * (4.0 * PI);
    Ok(run(spec, |rng| {
        let n2 = unit_vector(rng);
        let n3 = unit_vector(rng);
        let k = [0, 1, 2].map(|i| p[1] * n2[i] - p[2] * n3[i] + if i == 2 { p[0] } else { 0.0 });
        outer * richardson(norm(k), p[3], eps)
    }))
}

/// Closed form of the angular window integral.
pub fn angular_window_exact(p: [ScaledMomentum; 4]) -> f64 {
    let p = p.map(|x| x.0);
    4.0 * PI * PI * raw_window(p).max(0.0) / (p[0] * p[1] * p[2] * p[3])
}

/// `∫ dp̂2 dp̂3 δ³(p1 + p2 + p3)` with the direction of `p1` fixed.
pub fn mc_three_momentum(p: [ScaledMomentum; 3], spec: &McSpec) -> Result<McEstimate> {
    spec.validate()?;
    let p = p.map(|x| x.0);
    check_momenta(&p)?;
    let eps = spec.epsilon.unwrap_or(1e-2 * p.iter().cloned().fold(f64::INFINITY, f64::min));
    let edges = [p[0] - p[1] - p[2], p[1] - p[0] - p[2], p[2] - p[0] - p[1]];
    if edges.iter().any(|e| e.abs() < EDGE_WIDTHS * eps) {
        return Err(Error::DegenerateMomenta(format!("{p:?}: triangle edge within {EDGE_WIDTHS} eps")));
    }
    Ok(run(spec, |rng| {
        let n2 = unit_vector(rng);
        let k = [0, 1, 2].map(|i| p[1] * n2[i] + if i == 2 { p[0] } else { 0.0 });
        4.0 * PI * richardson(norm(k), p[2], eps)
    }))
}

/// `−(π/(p1 p2 p3)) [1 + sgn(p1−p2−p3) + sgn(p2−p1−p3) + sgn(p3−p1−p2)]`.
pub fn three_momentum_exact(p: [ScaledMomentum; 3]) -> f64 {
    let p = p.map(|x| x.0);
    let sgn = |x: f64| if x > 0.0 { 1.0 } else if x < 0.0 { -1.0 } else { 0.0 };
    let s = 1.0 + sgn(p[0] - p[1] - p[2]) + sgn(p[1] - p[0] - p[2]) + sgn(p[2] - p[0] - p[1]);
    -PI / (p[0] * p[1] * p[2]) * s
}

/// Energy sampler on `(0, S)` with inverse-square-root weight at both ends.
fn endpoint_sample(rng: &mut ChaCha8Rng, s: f64) -> (f64, f64) {
    let u: f64 = rng.gen();
    let x = s * u * u;
    let x = if rng.gen::<bool>() { x } else { s - x };
    let pdf = 0.25 / s.sqrt() * (1.0 / x.sqrt() + 1.0 / (s - x).sqrt());
    (x, pdf)
}

/// 9-dimensional NN loss integral with unit kernel at equilibrium,
/// `∫ dp2 dp3 dp4 δ(E1+E2−E3−E4) δ³(p1+p2−p3−p4) f1 f2 (1+f3)(1+f4)`.
/// Equals `π²/2` times the reduced `q_collision(LossOnly, ConstantOne)`.
///
/// Only the momentum delta is smoothed (`epsilon` is its width, default
/// `0.01 p1`). The energy delta is resolved exactly: smoothing it and
/// truncating at `E4 = 0` loses `O(√ε)` of the `E4^{-1/2}` endpoint mass,
/// a bias Richardson extrapolation cannot remove.
pub fn mc_q_loss(e1: ScaledEnergy, n: CondensateScale, spec: &McSpec) -> Result<McEstimate> {
    spec.validate()?;
    let e1 = e1.0;
    if !(e1 > 0.0 && e1.is_finite()) {
        return Err(Error::InvalidInput(format!("E1 must be positive, got {e1}")));
    }
    let q1 = n.quasi_particle(e1);
    let eps = spec.epsilon.unwrap_or(1e-2 * q1.momentum);
    let f1 = bose(e1);
    let gamma = Gamma::new(0.5, 1.0).expect("valid shape");
    let norm_gamma = PI.sqrt();
    // p² dp = (p χ / 2) dE on the Bogoliubov shell
    let shell = |e: f64| {
        let q = n.quasi_particle(e);
        (q.momentum, 0.5 * q.momentum * q.chi)
    };
    let solid = (4.0 * PI) * (4.0 * PI);

    let est = run(spec, |rng| {
        let e2: f64 = gamma.sample(rng);
        if e2 <= 0.0 {
            return 0.0;
        }
        let pdf2 = (-e2).exp() / (e2.sqrt() * norm_gamma);
        let s = e1 + e2;
        let (e3, pdf3) = endpoint_sample(rng, s);
        let e4 = s - e3;
        if e3 <= 0.0 || e4 <= 0.0 {
            return 0.0;
        }
        let n2 = unit_vector(rng);
        let n3 = unit_vector(rng);
        let (p2, m2) = shell(e2);
        let (p3, m3) = shell(e3);
        let (p4, m4) = shell(e4);
        let weight = f1 * bose(e2) * bose_plus_one(e3) * bose_plus_one(e4) * m2 * m3 * m4 * solid / (pdf2 * pdf3);
        // the integrand is symmetric in 3 <-> 4: sample the shorter
        // direction and integrate the longer one against the delta
        let (short, long) = if p3 <= p4 { (p3, p4) } else { (p4, p3) };
        let k = norm([0, 1, 2].map(|i| p2 * n2[i] - short * n3[i] + if i == 2 { q1.momentum } else { 0.0 }));
        weight * richardson(k, long, eps)
    });
    if !(est.value > 0.0) || est.rel_error() > MAX_REL_ERROR {
        return Err(Error::McNoise { rel_error: est.rel_error(), limit: MAX_REL_ERROR });
    }
    Ok(est)
}

/// Ratio between the 9-dimensional loss integral and the reduced scaled `Q`.
pub const LOSS_NORMALIZATION: f64 = PI * PI / 2.0;
