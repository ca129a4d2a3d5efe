//! On-disk cache of computed curves, one human-readable CSV per curve, named
//! by the SHA-256 of everything the curve depends on.

use std::path::{Path, PathBuf};

use bogoscatter_core::{AlphaCurve, CondensateScale, CurveKind, EnergyGrid, KernelForm, NcWeighting, QuadratureSpec};
use sha2::{Digest, Sha256};

use crate::error::CliResult;
use crate::output::{num, write_atomic, Table};

pub const ENV_DIR: &str = "BOGOSCATTER_CACHE_DIR";

pub struct Cache {
    dir: Option<PathBuf>,
}

/// Everything that determines a curve.
#[derive(Debug, Clone, Copy)]
pub struct CurveRequest {
    pub nbar: CondensateScale,
    pub kind: CurveKind,
    pub form: KernelForm,
    pub grid: EnergyGrid,
    pub quad: QuadratureSpec,
}

impl CurveRequest {
    fn key(&self) -> String {
        // Debug output of f64 is the shortest exact representation
        let text = format!(
            "bogoscatter-core {}|{:?}|{:?}|{:?}|{:?}|{:?}",
            bogoscatter_core::VERSION,
            self.kind,
            self.nbar.nbar(),
            self.form,
            self.grid,
            self.quad
        );
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    fn compute(&self) -> bogoscatter_core::Result<AlphaCurve> {
        match self.kind {
            CurveKind::NormalNormal => AlphaCurve::alpha_t(self.nbar, self.form, &self.grid, &self.quad),
            CurveKind::NormalCondensate(w) => AlphaCurve::alpha_s(self.nbar, self.form, w, &self.grid, &self.quad),
        }
    }
}

pub fn alpha_column(kind: CurveKind) -> &'static str {
    match kind {
        CurveKind::NormalNormal => "alpha_T",
        CurveKind::NormalCondensate(_) => "alpha_S",
    }
}

pub fn weighting_label(kind: CurveKind) -> Option<&'static str> {
    match kind {
        CurveKind::NormalNormal => None,
        CurveKind::NormalCondensate(w) => Some(NcWeighting::label(w)),
    }
}

impl Cache {
    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    pub fn at(dir: PathBuf) -> Self {
        Cache { dir: Some(dir) }
    }

    /// `$BOGOSCATTER_CACHE_DIR`, else `$XDG_CACHE_HOME/bogoscatter`, else `~/.cache/bogoscatter`.
    pub fn default_dir() -> Option<PathBuf> {
        if let Some(d) = std::env::var_os(ENV_DIR) {
            return Some(PathBuf::from(d));
        }
        if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
            return Some(PathBuf::from(d).join("bogoscatter"));
        }
        std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("bogoscatter"))
    }

    /// Loads the curve if cached, otherwise computes and stores it.
    pub fn curve(&self, req: &CurveRequest) -> CliResult<AlphaCurve> {
        let Some(dir) = &self.dir else {
            return Ok(req.compute()?);
        };
        let path = dir.join(format!("{}.csv", req.key()));
        if let Some(curve) = load(&path, req) {
            return Ok(curve);
        }
        let curve = req.compute()?;
        std::fs::create_dir_all(dir)?;
        write_atomic(&path, &render(&curve, req)?)?;
        Ok(curve)
    }
}

fn render(curve: &AlphaCurve, req: &CurveRequest) -> CliResult<Vec<u8>> {
    let mut t = Table::new(&["nbar", "E", alpha_column(req.kind), "numerator", "denominator"]);
    t.meta("cache_key", req.key());
    t.meta("library_version", bogoscatter_core::VERSION);
    t.meta("kernel_form", req.form.label());
    if let Some(w) = weighting_label(req.kind) {
        t.meta("mode", w);
    }
    t.meta("quadrature", format!("{:?}", req.quad));
    for ((e, a), [p, q]) in curve.energies.iter().zip(&curve.alpha).zip(&curve.moments) {
        t.row(vec![num(curve.nbar), num(*e), num(*a), num(*p), num(*q)]);
    }
    t.render()
}

/// Any unreadable or inconsistent file is treated as a miss.
fn load(path: &Path, req: &CurveRequest) -> Option<AlphaCurve> {
    let text = std::fs::read_to_string(path).ok()?;
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let (mut energies, mut alpha, mut moments) = (Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let r = record.ok()?;
        let v: Vec<f64> = r.iter().map(|s| s.parse().ok()).collect::<Option<_>>()?;
        if v.len() != 5 || v[0].to_bits() != req.nbar.nbar().to_bits() {
            return None;
        }
        energies.push(v[1]);
        alpha.push(v[2]);
        moments.push([v[3], v[4]]);
    }
    if energies != req.grid.energies() {
        return None;
    }
    Some(AlphaCurve {
        nbar: req.nbar.nbar(),
        kind: req.kind,
        form: req.form,
        quad: req.quad,
        energies,
        alpha,
        moments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request() -> CurveRequest {
        CurveRequest {
            nbar: CondensateScale::new(0.04).unwrap(),
            kind: CurveKind::NormalCondensate(NcWeighting::Consistent),
            form: KernelForm::AsPrinted,
            grid: EnergyGrid { lo: 1e-3, hi: 10.0, points: 7 },
            quad: QuadratureSpec::default(),
        }
    }

    #[test]
    fn cached_curve_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::at(dir.path().to_path_buf());
        let cold = cache.curve(&request()).unwrap();
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let warm = cache.curve(&request()).unwrap();
        assert_eq!(cold, warm);
        assert_eq!(cold, Cache::disabled().curve(&request()).unwrap());
    }

    #[test]
    fn key_tracks_inputs() {
        let a = request();
        let mut b = a;
        b.quad.rel_tol = 1e-7;
        let mut c = a;
        c.kind = CurveKind::NormalNormal;
        assert_ne!(a.key(), b.key());
        assert_ne!(a.key(), c.key());
        assert_eq!(a.key(), request().key());
    }
}
