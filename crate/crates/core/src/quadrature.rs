//! Globally adaptive Gauss–Kronrod (7/15) quadrature for vector-valued
//! integrands, with a logarithmic substitution near zero for the
//! semi-infinite energy integrals of the collision operators.
//!
//! Integrals over `(0, upper)` are split at `log_split`: below it the
//! integrand is sampled in `t = ln E` down to a floor twelve decades lower,
//! and the `(0, floor)` remainder is estimated from the local power law
//! (which also detects non-integrable endpoints). Above it the variable is
//! linear, with user breakpoints at the known kinks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bogoliubov::WindowRule;
use crate::error::{Error, Result};

/// Tolerances and truncation used by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper truncation of semi-infinite energy integrals, in units of `k_B T`.
    pub e_max: f64,
    pub max_subdivisions: usize,
    /// Energy below which a logarithmic substitution is used. `None` means
    /// `min(n̄, 1)/100`.
    pub log_split: Option<f64>,
    #[doc(hidden)]
    #[serde(default)]
    pub window: WindowRule,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-6,
            abs_tol: 1e-12,
            e_max: 40.0,
            max_subdivisions: 2000,
            log_split: None,
            window: WindowRule::Clamped,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidInput(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::InvalidInput(format!("abs_tol must be >= 0, got {}", self.abs_tol)));
        }
        if !(self.e_max >= 20.0) || !self.e_max.is_finite() {
            return Err(Error::InvalidInput(format!("e_max must be finite and >= 20, got {}", self.e_max)));
        }
        if self.max_subdivisions < 16 {
            return Err(Error::InvalidInput("max_subdivisions must be at least 16".into()));
        }
        if let Some(s) = self.log_split {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidInput(format!("log_split must be positive, got {s}")));
            }
        }
        Ok(())
    }

    /// Effective logarithmic split for a given condensate scale.
    pub fn log_split_for(&self, nbar: f64) -> f64 {
        self.log_split.unwrap_or_else(|| {
            let s = nbar.min(1.0) / 100.0;
            if s > 0.0 {
                s
            } else {
                0.01
            }
        })
    }

    /// Tolerances for an integral nested inside another one.
    pub(crate) fn inner(&self) -> Self {
        let mut s = *self;
        s.rel_tol = self.rel_tol * 0.1;
        s.abs_tol = self.abs_tol * 0.1;
        s
    }
}

/// A scalar integral and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Decades below the logarithmic split that are integrated explicitly.
const FLOOR_DECADES: f64 = 12.0;
/// Width of the initial chunks of the logarithmic region, in `ln E`.
const LOG_CHUNK: f64 = 2.0 * std::f64::consts::LN_10;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Map {
    Linear,
    /// Endpoints are `ln E`; the integrand picks up the Jacobian `E`.
    Log,
}

#[derive(Debug, Clone, Copy)]
struct Interval<const N: usize> {
    a: f64,
    b: f64,
    map: Map,
    value: [f64; N],
    error: [f64; N],
    frozen: bool,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn nodes(a: f64, b: f64, map: Map, out: &mut Vec<f64>) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut push = |t: f64| {
        out.push(match map {
            Map::Linear => t,
            Map::Log => t.exp(),
        })
    };
    push(c);
    for x in XGK.iter().take(7) {
        push(c - h * x);
        push(c + h * x);
    }
}

fn apply_rule<const N: usize>(a: f64, b: f64, map: Map, xs: &[f64], fs: &[[f64; N]]) -> ([f64; N], [f64; N]) {
    let h = 0.5 * (b - a);
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for i in 0..N {
        let g = |k: usize| -> f64 {
            let jac = match map {
                Map::Linear => 1.0,
                Map::Log => xs[k],
            };
            fs[k][i] * jac
        };
        let fc = g(0);
        let mut resk = WGK[7] * fc;
        let mut resg = WG[3] * fc;
        let mut resabs = resk.abs();
        let mut pairs = [(0.0, 0.0); 7];
        for j in 0..7 {
            let (f1, f2) = (g(1 + 2 * j), g(2 + 2 * j));
            pairs[j] = (f1, f2);
            resk += WGK[j] * (f1 + f2);
            resabs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                resg += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * resk;
        let mut resasc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            resasc += WGK[j] * ((pairs[j].0 - mean).abs() + (pairs[j].1 - mean).abs());
        }
        value[i] = resk * h;
        error[i] = rescale_error((resk - resg) * h, resabs * h.abs(), resasc * h.abs());
    }
    (value, error)
}

/// Relative rounding level below which a component coupled to a reference
/// component (a difference of two large terms) is not refined further.
const ROUNDING_FLOOR: f64 = 1e-12;

fn tolerances<const N: usize>(total: &[f64; N], spec: &QuadratureSpec, coupled: &[(usize, usize)]) -> [f64; N] {
    let mut scale: [f64; N] = std::array::from_fn(|i| (spec.rel_tol * total[i].abs()).max(spec.abs_tol));
    for &(i, r) in coupled {
        scale[i] = scale[i].max(ROUNDING_FLOOR * total[r].abs());
    }
    scale
}

/// Global adaptive integration over a set of initial intervals.
fn adaptive<const N: usize, F>(
    initial: &[(f64, f64, Map)],
    f: &F,
    spec: &QuadratureSpec,
    parallel: bool,
    coupled: &[(usize, usize)],
) -> Result<([f64; N], [f64; N])>
where
    F: Fn(f64) -> Result<[f64; N]> + Sync,
{
    let eval = |xs: &[f64]| -> Result<Vec<[f64; N]>> {
        let out: Result<Vec<[f64; N]>> = if parallel {
            xs.par_iter().map(|&x| f(x)).collect()
        } else {
            xs.iter().map(|&x| f(x)).collect()
        };
        let out = out?;
        if out.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("integrand returned a non-finite value".into()));
        }
        Ok(out)
    };

    let mut xs = Vec::with_capacity(15 * initial.len());
    for &(a, b, map) in initial {
        nodes(a, b, map, &mut xs);
    }
    let fs = eval(&xs)?;
    let mut intervals: Vec<Interval<N>> = initial
        .iter()
        .enumerate()
        .map(|(k, &(a, b, map))| {
            let (value, error) = apply_rule(a, b, map, &xs[15 * k..15 * k + 15], &fs[15 * k..15 * k + 15]);
            Interval { a, b, map, value, error, frozen: false }
        })
        .collect();

    loop {
        let mut total = [0.0; N];
        let mut err = [0.0; N];
        for iv in &intervals {
            for i in 0..N {
                total[i] += iv.value[i];
                err[i] += iv.error[i];
            }
        }
        let scale = tolerances(&total, spec, coupled);
        if (0..N).all(|i| err[i] <= scale[i]) {
            return Ok((total, err));
        }
        let worst = intervals
            .iter()
            .enumerate()
            .filter(|(_, iv)| !iv.frozen)
            .map(|(k, iv)| {
                let p = (0..N)
                    .map(|i| iv.error[i] / scale[i].max(f64::MIN_POSITIVE))
                    .fold(0.0, f64::max);
                (k, p)
            })
            .max_by(|x, y| x.1.total_cmp(&y.1));
        let Some((k, _)) = worst else {
            return Err(non_convergence(&total, &err, &scale, intervals.len()));
        };
        if intervals.len() >= spec.max_subdivisions {
            return Err(non_convergence(&total, &err, &scale, intervals.len()));
        }
        let iv = intervals[k];
        let mid = 0.5 * (iv.a + iv.b);
        if (iv.b - iv.a).abs() <= 1e3 * f64::EPSILON * iv.a.abs().max(iv.b.abs()).max(f64::MIN_POSITIVE) {
            intervals[k].frozen = true;
            continue;
        }
        let mut xs = Vec::with_capacity(30);
        nodes(iv.a, mid, iv.map, &mut xs);
        nodes(mid, iv.b, iv.map, &mut xs);
        let fs = eval(&xs)?;
        let (v1, e1) = apply_rule(iv.a, mid, iv.map, &xs[..15], &fs[..15]);
        let (v2, e2) = apply_rule(mid, iv.b, iv.map, &xs[15..], &fs[15..]);
        intervals[k] = Interval { a: iv.a, b: mid, map: iv.map, value: v1, error: e1, frozen: false };
        intervals.push(Interval { a: mid, b: iv.b, map: iv.map, value: v2, error: e2, frozen: false });
    }
}

fn non_convergence<const N: usize>(total: &[f64; N], err: &[f64; N], scale: &[f64; N], n: usize) -> Error {
    let i = (0..N)
        .max_by(|&x, &y| (err[x] / scale[x]).total_cmp(&(err[y] / scale[y])))
        .unwrap_or(0);
    Error::NonConvergence {
        value: total[i],
        error_estimate: err[i],
        subdivisions: n,
    }
}

/// Integrates `f` over `(0, upper)` with a logarithmic region below `split`,
/// linear pieces above it, and extra breakpoints at `breaks`.
pub(crate) fn integrate_from_zero<const N: usize, F>(
    f: &F,
    upper: f64,
    breaks: &[f64],
    split: f64,
    spec: &QuadratureSpec,
    parallel: bool,
) -> Result<([f64; N], [f64; N])>
where
    F: Fn(f64) -> Result<[f64; N]> + Sync,
{
    integrate_from_zero_coupled(f, upper, breaks, split, spec, parallel, &[])
}

/// As [`integrate_from_zero`]; each `(i, r)` in `coupled` lets component `i`
/// stop refining once its error is at the rounding level of component `r`.
pub(crate) fn integrate_from_zero_coupled<const N: usize, F>(
    f: &F,
    upper: f64,
    breaks: &[f64],
    split: f64,
    spec: &QuadratureSpec,
    parallel: bool,
    coupled: &[(usize, usize)],
) -> Result<([f64; N], [f64; N])>
where
    F: Fn(f64) -> Result<[f64; N]> + Sync,
{
    if !(upper > 0.0) {
        return Ok(([0.0; N], [0.0; N]));
    }
    let split = split.min(upper);
    // the floor sits below every scale of the integrand, so the tail fit sees a clean power law
    let lowest = breaks.iter().copied().filter(|&b| b > 0.0).fold(split, f64::min);
    let floor = lowest * 10f64.powf(-FLOOR_DECADES);
    let mut initial = Vec::new();

    // logarithmic region
    let mut cuts: Vec<f64> = vec![floor.ln(), split.ln()];
    let mut t = floor.ln() + LOG_CHUNK;
    while t < split.ln() - 0.1 {
        cuts.push(t);
        t += LOG_CHUNK;
    }
    cuts.extend(breaks.iter().filter(|&&b| b > floor && b < split).map(|b| b.ln()));
    push_pieces(&mut cuts, Map::Log, &mut initial);

    // linear region
    if upper > split {
        let mut cuts: Vec<f64> = vec![split, upper];
        cuts.extend(breaks.iter().copied().filter(|&b| b > split && b < upper));
        push_pieces(&mut cuts, Map::Linear, &mut initial);
    }

    let (mut total, mut err) = adaptive(&initial, f, spec, parallel, coupled)?;
    let allowed = tolerances(&total, spec, coupled);

    // (0, floor) remainder from the local power law f ~ E^α
    let lo = f(floor)?;
    let hi = f(10.0 * floor)?;
    for i in 0..N {
        if lo[i] == 0.0 || !lo[i].is_finite() {
            continue;
        }
        let ratio = (hi[i] / lo[i]).abs();
        let alpha = if ratio > 0.0 { ratio.log10() } else { 0.0 };
        let edge = floor * lo[i];
        if alpha <= -0.98 {
            if edge.abs() > allowed[i] {
                return Err(Error::Divergent { value: total[i], tail: edge });
            }
        } else {
            let tail = edge / (1.0 + alpha);
            total[i] += tail;
            err[i] += 0.1 * tail.abs();
        }
    }
    Ok((total, err))
}

fn push_pieces(cuts: &mut Vec<f64>, map: Map, out: &mut Vec<(f64, f64, Map)>) {
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300));
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            out.push((w[0], w[1], map));
        }
    }
}

/// Integrates a scalar function over `[a, b]`. `b` may be `f64::INFINITY`,
/// in which case the range is truncated at `spec.e_max`. Integrals starting
/// at zero use the logarithmic substitution below `spec.log_split`
/// (default `0.01`), which also absorbs integrable `E^{-1/2}`-type endpoints.
pub fn integrate_1d<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult>
where
    F: Fn(f64) -> f64 + Sync,
{
    spec.validate()?;
    if !(a >= 0.0) || a.is_infinite() || b.is_nan() {
        return Err(Error::InvalidInput(format!("bad integration domain [{a}, {b}]")));
    }
    let b = if b.is_infinite() { spec.e_max } else { b };
    if b <= a {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let g = |x: f64| Ok([f(x)]);
    let (v, e) = if a == 0.0 {
        integrate_from_zero(&g, b, &[], spec.log_split.unwrap_or(0.01), spec, false)?
    } else {
        adaptive(&[(a, b, Map::Linear)], &g, spec, false, &[])?
    };
    Ok(QuadResult { value: v[0], error: e[0] })
}
