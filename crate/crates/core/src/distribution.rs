use serde::{Deserialize, Serialize};

use crate::bogoliubov::{bose, bose_plus_one};
use crate::error::{Error, Result};

/// Isotropic quasi-particle occupation `f(E)`.
///
/// Tabulated distributions interpolate `ln f` linearly in `E` between nodes
/// (plain linear interpolation where a node is zero), continue as `1/E` below
/// the grid and decay as `e^{-E}` above it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotropicDistribution {
    kind: Kind,
    scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Kind {
    BoseEinstein,
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

impl IsotropicDistribution {
    /// Equilibrium `1/(e^E − 1)`, evaluated analytically.
    pub fn bose_einstein() -> Self {
        IsotropicDistribution { kind: Kind::BoseEinstein, scale: 1.0 }
    }

    /// `f ≡ 0`.
    pub fn vacuum() -> Self {
        IsotropicDistribution { kind: Kind::BoseEinstein, scale: 0.0 }
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::InvalidInput("distribution needs at least two (E, f) nodes".into()));
        }
        if grid[0] <= 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("distribution grid must be positive and strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput("occupations must be finite and non-negative".into()));
        }
        Ok(IsotropicDistribution { kind: Kind::Tabulated { grid, values }, scale: 1.0 })
    }

    /// Multiplies every occupation by `factor`.
    pub fn scaled(mut self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(Error::InvalidInput(format!("scale factor must be >= 0, got {factor}")));
        }
        self.scale *= factor;
        Ok(self)
    }

    /// True for the exact, unscaled equilibrium distribution.
    pub fn is_equilibrium(&self) -> bool {
        matches!(self.kind, Kind::BoseEinstein) && self.scale == 1.0
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn label(&self) -> String {
        match self.kind {
            Kind::BoseEinstein if self.scale == 1.0 => "bose-einstein".into(),
            Kind::BoseEinstein => format!("{}*bose-einstein", self.scale),
            Kind::Tabulated { ref grid, .. } => format!("tabulated[{}]", grid.len()),
        }
    }

    /// `(f, 1 + f)` at energy `e > 0`.
    #[inline]
    pub fn occupation(&self, e: f64) -> (f64, f64) {
        match self.kind {
            Kind::BoseEinstein if self.scale == 1.0 => (bose(e), bose_plus_one(e)),
            Kind::BoseEinstein => {
                let f = self.scale * bose(e);
                (f, 1.0 + f)
            }
            Kind::Tabulated { ref grid, ref values } => {
                let f = self.scale * interpolate(grid, values, e);
                (f, 1.0 + f)
            }
        }
    }
}

impl IsotropicDistribution {
    /// `ln((1 + f)/f)`, `+∞` where `f = 0`. Equals `E` at equilibrium.
    #[inline]
    pub fn log_ratio(&self, e: f64) -> f64 {
        match self.kind {
            Kind::BoseEinstein if self.scale == 1.0 => e,
            _ => {
                let f = self.occupation(e).0;
                if f > 0.0 {
                    (1.0 / f).ln_1p()
                } else {
                    f64::INFINITY
                }
            }
        }
    }
}

fn interpolate(grid: &[f64], values: &[f64], e: f64) -> f64 {
    let n = grid.len();
    if e <= grid[0] {
        return values[0] * grid[0] / e;
    }
    if e >= grid[n - 1] {
        return values[n - 1] * (grid[n - 1] - e).exp();
    }
    let k = grid.partition_point(|&x| x <= e) - 1;
    let (x0, x1, y0, y1) = (grid[k], grid[k + 1], values[k], values[k + 1]);
    let w = (e - x0) / (x1 - x0);
    if y0 > 0.0 && y1 > 0.0 {
        (y0.ln() + w * (y1.ln() - y0.ln())).exp()
    } else {
        y0 + w * (y1 - y0)
    }
}
