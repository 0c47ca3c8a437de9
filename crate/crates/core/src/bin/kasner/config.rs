use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::ValueEnum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use kasner_modes::kasner::{KasnerExponents, Momentum, DEFAULT_TOL};
use kasner_modes::modes::{Coordinate, ModeSpec};

/// Problems with flags or configuration files; reported with exit code 64.
#[derive(Debug, Error)]
pub enum UsageError {
    #[error("missing required value `{0}` (flag or config key)")]
    Missing(&'static str),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
    #[error("config file {path}: {source}")]
    Config { path: PathBuf, source: serde_json::Error },
}

fn invalid(key: &'static str, reason: impl Into<String>) -> UsageError {
    UsageError::Invalid { key, reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Coords {
    T,
    S,
}

impl Coords {
    pub fn coordinate(self) -> Coordinate {
        match self {
            Coords::T => Coordinate::PhysicalTime,
            Coords::S => Coordinate::LogTime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Small,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Solve,
    Asymptotics,
}

/// Flat run configuration. Every key is optional; flags override file values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphadot0: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coords: Option<Coords>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_floor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_min: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_max: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_count: Option<[usize; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_spacing: Option<Spacing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planck: Option<f64>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),* $(,)?) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).map_err(|source| UsageError::Config { path: path.to_owned(), source }.into())
    }

    /// Values present in `other` replace those in `self`.
    pub fn overlay(&mut self, other: &RunConfig) {
        overlay!(self, other; p, w, t0, alpha0, alphadot0, to, coords, tol, format, out, threshold, fit,
            s_floor, window, task, sweep_min, sweep_max, sweep_count, sweep_spacing, v, x0, tp, tq, planck);
    }

    pub fn exponents(&self) -> anyhow::Result<KasnerExponents> {
        let [a, b, c] = self.p.ok_or(UsageError::Missing("p"))?;
        Ok(KasnerExponents::new(a, b, c, DEFAULT_TOL)?)
    }

    pub fn momentum(&self) -> Result<Momentum, UsageError> {
        let [a, b, c] = self.w.ok_or(UsageError::Missing("w"))?;
        finite("w", &[a, b, c])?;
        Ok(Momentum::new(a, b, c))
    }

    /// Fill the defaults shared by mode-solving commands.
    pub fn mode_defaults(&mut self) {
        self.t0.get_or_insert(1.0);
        self.alpha0.get_or_insert([1.0, 0.0]);
        self.alphadot0.get_or_insert([0.0, 0.0]);
        self.tol.get_or_insert(1e-10);
        self.coords.get_or_insert(Coords::T);
    }

    pub fn mode_spec(&self) -> Result<ModeSpec, UsageError> {
        let w = self.momentum()?;
        let t0 = self.t0.ok_or(UsageError::Missing("t0"))?;
        positive("t0", t0)?;
        let a = self.alpha0.ok_or(UsageError::Missing("alpha0"))?;
        let d = self.alphadot0.ok_or(UsageError::Missing("alphadot0"))?;
        finite("alpha0", &a)?;
        finite("alphadot0", &d)?;
        ModeSpec::new(w, t0, Complex64::new(a[0], a[1]), Complex64::new(d[0], d[1])).map_err(|e| invalid("t0", e.to_string()))
    }

    pub fn tolerance(&self) -> Result<f64, UsageError> {
        let tol = self.tol.ok_or(UsageError::Missing("tol"))?;
        if !(tol > 0.0 && tol < 1.0) {
            return Err(invalid("tol", format!("must lie in (0, 1), got {tol}")));
        }
        Ok(tol)
    }

    pub fn required(&self, key: &'static str, value: Option<f64>) -> Result<f64, UsageError> {
        let v = value.ok_or(UsageError::Missing(key))?;
        finite(key, &[v])?;
        Ok(v)
    }

    /// Momentum grid of a sweep, first axis outermost.
    pub fn sweep_grid(&self) -> Result<Vec<[f64; 3]>, UsageError> {
        let lo = self.sweep_min.ok_or(UsageError::Missing("sweep_min"))?;
        let hi = self.sweep_max.ok_or(UsageError::Missing("sweep_max"))?;
        let n = self.sweep_count.ok_or(UsageError::Missing("sweep_count"))?;
        let spacing = self.sweep_spacing.unwrap_or(Spacing::Linear);
        finite("sweep_min", &lo)?;
        finite("sweep_max", &hi)?;
        let axes: Vec<Vec<f64>> = (0..3).map(|j| axis_values(lo[j], hi[j], n[j], spacing)).collect::<Result<_, _>>()?;
        let mut grid = Vec::with_capacity(n.iter().product());
        for &a in &axes[0] {
            for &b in &axes[1] {
                for &c in &axes[2] {
                    grid.push([a, b, c]);
                }
            }
        }
        Ok(grid)
    }
}

fn axis_values(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Result<Vec<f64>, UsageError> {
    if n == 0 {
        return Err(invalid("sweep_count", "counts must be at least 1"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if spacing == Spacing::Log && !(lo > 0.0 && hi > 0.0) {
        return Err(invalid("sweep_spacing", "log spacing needs positive bounds"));
    }
    Ok((0..n)
        .map(|i| {
            let f = i as f64 / (n - 1) as f64;
            match spacing {
                Spacing::Linear => lo + (hi - lo) * f,
                Spacing::Log => (lo.ln() + (hi.ln() - lo.ln()) * f).exp(),
            }
        })
        .collect())
}

fn finite(key: &'static str, v: &[f64]) -> Result<(), UsageError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(invalid(key, "values must be finite"))
    }
}

fn positive(key: &'static str, v: f64) -> Result<(), UsageError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(key, format!("must be positive, got {v}")))
    }
}

/// Parse `a,b,...` into exactly `N` floats.
pub fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got {}", parts.len()));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("`{p}` is not a number"))?;
    }
    Ok(out)
}

pub fn parse_counts(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected 3 comma-separated counts, got {}", parts.len()));
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.parse().map_err(|_| format!("`{p}` is not a count"))?;
    }
    Ok(out)
}
