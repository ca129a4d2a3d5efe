//! Flat `key = value` configuration files and flag/file/default resolution.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Keys accepted in a configuration file. Dashes and underscores are interchangeable.
const KNOWN_KEYS: &[&str] = &[
    "threads",
    "no_cache",
    "cache_dir",
    "rel_tol",
    "abs_tol",
    "e_max",
    "max_subdivisions",
    "log_split",
    "kernel_form",
    "nbar",
    "nbar_log",
    "emin_frac",
    "emax",
    "points",
    "mode",
    "threshold",
    "dos",
    "species",
    "density",
    "fraction",
    "temperature_ratio",
    "temperature",
    "mass_kg",
    "a0_nm",
    "scale",
    "seed",
    "samples",
];

#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected `key = value`", no + 1)))?;
            let key = normalize(k);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("config line {}: unknown key `{key}`", no + 1)));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("config line {}: duplicate key `{key}`", no + 1)));
            }
        }
        Ok(FileConfig { values })
    }
}

/// Resolves settings with precedence flag > file > default and keeps an
/// echo of every resolved value for output headers.
pub struct Resolver {
    file: FileConfig,
    echo: Vec<(String, String)>,
}

impl Resolver {
    pub fn new(file: FileConfig) -> Self {
        Resolver { file, echo: Vec::new() }
    }

    /// Resolves a value with custom parsing and rendering.
    pub fn resolve_with<T>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: impl FnOnce() -> T,
        parse: impl Fn(&str) -> Result<T, String>,
        show: impl Fn(&T) -> String,
    ) -> CliResult<T> {
        let value = match flag {
            Some(v) => v,
            None => match self.file.values.get(key) {
                Some(text) => parse(text).map_err(|e| CliError::Config(format!("config key `{key}`: {e}")))?,
                None => default(),
            },
        };
        self.echo.push((key.to_string(), show(&value)));
        Ok(value)
    }

    pub fn resolve<T>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.resolve_with(key, flag, || default, |s| s.parse::<T>().map_err(|e| e.to_string()), |v| v.to_string())
    }

    /// Like [`resolve`](Self::resolve) but with no default; absent stays `None`.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => Some(v),
            None => match self.file.values.get(key) {
                Some(text) => Some(
                    text.parse::<T>()
                        .map_err(|e| CliError::Config(format!("config key `{key}`: {e}")))?,
                ),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.echo.push((key.to_string(), v.to_string()));
        }
        Ok(value)
    }

    /// Resolves a setting that does not affect results and is left out of the echo.
    pub fn quiet<T>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => match self.file.values.get(key) {
                Some(text) => text
                    .parse::<T>()
                    .map(Some)
                    .map_err(|e| CliError::Config(format!("config key `{key}`: {e}"))),
                None => Ok(None),
            },
        }
    }

    /// True when the configuration file sets `key`.
    pub fn file_has(&self, key: &str) -> bool {
        self.file.values.contains_key(key)
    }

    /// Records a derived setting that has no flag of its own.
    pub fn note(&mut self, key: &str, value: impl Display) {
        self.echo.push((key.to_string(), value.to_string()));
    }

    pub fn echo(&self) -> &[(String, String)] {
        &self.echo
    }
}

/// Comma-separated list of floats.
pub fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("empty list".into());
    }
    Ok(values)
}

/// `lo:hi:count`, log-spaced with exact endpoints.
pub fn parse_log_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        return Err(format!("expected lo:hi:count, got `{text}`"));
    };
    let lo: f64 = lo.trim().parse().map_err(|e| format!("lower end: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("upper end: {e}"))?;
    let count: usize = count.trim().parse().map_err(|e| format!("count: {e}"))?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) || count < 2 {
        return Err(format!("need 0 < lo < hi and count >= 2, got `{text}`"));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let m = (count - 1) as f64;
    Ok((0..count)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == count => hi,
            _ => (a + (b - a) * i as f64 / m).exp(),
        })
        .collect())
}

pub fn show_list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",")
}

/// Number density with an optional unit suffix (`nm-3`, `nm^-3`, `m-3`, `m^-3`).
/// A bare number is read in nm⁻³. Returns m⁻³.
pub fn parse_density(text: &str) -> Result<f64, String> {
    let t = text.trim().to_ascii_lowercase().replace(' ', "").replace('^', "").replace('⁻', "-").replace('³', "3");
    let (number, factor) = if let Some(n) = t.strip_suffix("nm-3") {
        (n, 1e27)
    } else if let Some(n) = t.strip_suffix("m-3") {
        (n, 1.0)
    } else {
        (t.as_str(), 1e27)
    };
    let value: f64 = number.parse().map_err(|e| format!("density `{text}`: {e}"))?;
    if !(value > 0.0 && value.is_finite()) {
        return Err(format!("density must be positive, got `{text}`"));
    }
    Ok(value * factor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_beats_file_beats_default() {
        let file = FileConfig::parse("# comment\nrel-tol = 1e-7\npoints = 50 # trailing\n").unwrap();
        let mut r = Resolver::new(file);
        assert_eq!(r.resolve("rel_tol", Some(1e-5), 1e-6).unwrap(), 1e-5);
        assert_eq!(r.resolve("points", None, 200usize).unwrap(), 50);
        assert_eq!(r.resolve("threshold", None, 1.05).unwrap(), 1.05);
        assert_eq!(r.echo().len(), 3);
    }

    #[test]
    fn bad_files_are_config_errors() {
        assert!(FileConfig::parse("nonsense").is_err());
        assert!(FileConfig::parse("colour = blue").is_err());
        assert!(FileConfig::parse("points = 1\npoints = 2").is_err());
        let mut r = Resolver::new(FileConfig::parse("points = many").unwrap());
        assert!(matches!(r.resolve("points", None, 1usize), Err(CliError::Config(_))));
    }

    #[test]
    fn ranges_and_densities() {
        let v = parse_log_range("1e-4:1e-1:25").unwrap();
        assert_eq!((v.len(), v[0], v[24]), (25, 1e-4, 1e-1));
        assert!(parse_log_range("1:0.5:3").is_err());
        assert_eq!(parse_list("1e-4, 4e-2").unwrap(), vec![1e-4, 4e-2]);
        assert_eq!(parse_density("1e-3nm-3").unwrap(), 1e-3 * 1e27);
        assert_eq!(parse_density("1e24 m^-3").unwrap(), 1e24);
        assert_eq!(parse_density("1e-9").unwrap(), 1e-9 * 1e27);
        assert!(parse_density("-1nm-3").is_err());
    }
}
