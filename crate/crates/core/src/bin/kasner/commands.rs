use std::fs;
use std::path::Path;

use anyhow::Context;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use kasner_modes::asymptotics::{amplitude_bound_check, large_time_fit, small_time_fit, AmplitudeBound, SmallTimeFit, WkbFit};
use kasner_modes::closedform::{basis_for, compare_numeric, BasisCase};
use kasner_modes::geodesics::{
    affine_span, init_lightlike, integrate_geodesic, redshift as redshift_report, GeodesicInit, GeodesicRecord, RedshiftReport,
};
use kasner_modes::modes::{solve_mode_s, solve_mode_t, ModeSample};

use crate::config::{Coords, FitKind, Format, RunConfig, Spacing, Task, UsageError};
use crate::output::{emit, json, num, sha256_hex, Csv};
use crate::{exit_code, EXIT_CHECK};

pub const MODE_SCHEMA: &str = "kasner-mode-v1";
const CLASSIFY_SCHEMA: &str = "kasner-classify-v1";
const COMPARE_SCHEMA: &str = "kasner-compare-v1";
const ASYMPTOTICS_SCHEMA: &str = "kasner-asymptotics-v1";
const SWEEP_SCHEMA: &str = "kasner-sweep-v1";
const GEODESIC_SCHEMA: &str = "kasner-geodesic-v1";
const REDSHIFT_SCHEMA: &str = "kasner-redshift-v1";

/// Redshift notions must agree to this relative level on `1 + z`.
const REDSHIFT_AGREEMENT: f64 = 1e-10;

fn json_only(cfg: &RunConfig, command: &'static str) -> Result<(), UsageError> {
    match cfg.format {
        Some(Format::Csv) => Err(UsageError::Invalid { key: "format", reason: format!("{command} writes JSON only") }),
        _ => Ok(()),
    }
}

fn physical_time_only(cfg: &RunConfig, command: &'static str) -> Result<(), UsageError> {
    match cfg.coords {
        Some(Coords::S) => Err(UsageError::Invalid { key: "coords", reason: format!("{command} works in t") }),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    class: String,
    linear_residual: f64,
    quadratic_residual: f64,
}

pub fn classify(mut cfg: RunConfig) -> anyhow::Result<u8> {
    let k = cfg.exponents()?;
    let (linear_residual, quadratic_residual) = k.residuals();
    let format = *cfg.format.get_or_insert(Format::Csv);
    let class = k.class().to_string();
    let bytes = match format {
        Format::Json => json(&ClassifyReport { schema: CLASSIFY_SCHEMA, config: &cfg, class, linear_residual, quadratic_residual }),
        Format::Csv => {
            let mut csv = Csv::new(CLASSIFY_SCHEMA, &cfg, &["class", "linear_residual", "quadratic_residual"]);
            csv.row(&[class, num(linear_residual), num(quadratic_residual)]);
            csv.into_bytes()
        }
    };
    emit(&bytes, cfg.out.as_deref())?;
    Ok(0)
}

/// Trajectory file layout, readable back with serde.
#[derive(Debug, Serialize, Deserialize, PartialEq)]
pub struct ModeFile {
    pub schema: String,
    pub config: RunConfig,
    pub coordinate: String,
    pub samples: Vec<ModeSample>,
}

fn solve_bytes(cfg: &mut RunConfig) -> anyhow::Result<Vec<u8>> {
    cfg.mode_defaults();
    let k = cfg.exponents()?;
    let spec = cfg.mode_spec()?;
    let tol = cfg.tolerance()?;
    let coords = cfg.coords.unwrap_or(Coords::T);
    let to = *cfg.to.get_or_insert(match coords {
        Coords::T => 100.0 * spec.t0,
        Coords::S => spec.t0.ln() + 100f64.ln(),
    });
    let format = *cfg.format.get_or_insert(Format::Csv);
    let traj = match coords {
        Coords::T => solve_mode_t(&k, &spec, to, tol),
        Coords::S => solve_mode_s(&k, &spec, to, tol),
    }
    .context("solving the mode equation")?;
    let samples = traj.samples();
    let label = coords.coordinate().label();
    Ok(match format {
        Format::Json => {
            let file = ModeFile { schema: MODE_SCHEMA.into(), config: cfg.clone(), coordinate: label.into(), samples };
            json(&file)
        }
        Format::Csv => {
            let mut csv = Csv::new(MODE_SCHEMA, cfg, &[label, "re_value", "im_value", "re_deriv", "im_deriv"]);
            for s in &samples {
                csv.numbers(&[s.x, s.value.re, s.value.im, s.derivative.re, s.derivative.im]);
            }
            csv.into_bytes()
        }
    })
}

pub fn solve(mut cfg: RunConfig) -> anyhow::Result<u8> {
    let bytes = solve_bytes(&mut cfg)?;
    emit(&bytes, cfg.out.as_deref())?;
    Ok(0)
}

#[derive(Serialize)]
struct CompareReport<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    case: BasisCase,
    basis: &'static str,
    c1: Complex64,
    c2: Complex64,
    samples: usize,
    max_rel_deviation: f64,
    worst_t: f64,
    threshold: f64,
    pass: bool,
}

pub fn compare(mut cfg: RunConfig) -> anyhow::Result<u8> {
    physical_time_only(&cfg, "compare")?;
    cfg.mode_defaults();
    let k = cfg.exponents()?;
    let spec = cfg.mode_spec()?;
    let tol = cfg.tolerance()?;
    let to = *cfg.to.get_or_insert(100.0 * spec.t0);
    let threshold = *cfg.threshold.get_or_insert(1e-6);
    let format = *cfg.format.get_or_insert(Format::Json);
    basis_for(&k, &spec.w, spec.t0)?;
    let c = compare_numeric(&k, &spec, to, tol).context("comparing closed form and numerics")?;
    let pass = c.max_rel_deviation <= threshold;
    let bytes = match format {
        Format::Json => json(&CompareReport {
            schema: COMPARE_SCHEMA,
            config: &cfg,
            case: c.case,
            basis: c.case.description(),
            c1: c.c1,
            c2: c.c2,
            samples: c.samples,
            max_rel_deviation: c.max_rel_deviation,
            worst_t: c.worst_t,
            threshold,
            pass,
        }),
        Format::Csv => {
            let header = ["case", "re_c1", "im_c1", "re_c2", "im_c2", "samples", "max_rel_deviation", "worst_t", "threshold", "pass"];
            let mut csv = Csv::new(COMPARE_SCHEMA, &cfg, &header);
            csv.row(&[
                c.case.to_string(),
                num(c.c1.re),
                num(c.c1.im),
                num(c.c2.re),
                num(c.c2.im),
                c.samples.to_string(),
                num(c.max_rel_deviation),
                num(c.worst_t),
                num(threshold),
                pass.to_string(),
            ]);
            csv.into_bytes()
        }
    };
    emit(&bytes, cfg.out.as_deref())?;
    Ok(if pass { 0 } else { EXIT_CHECK })
}

#[derive(Serialize)]
struct AsymptoticsReport<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    fit: FitKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    small_time: Option<SmallTimeFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    large_time: Option<WkbFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitude_bound: Option<AmplitudeBound>,
}

fn asymptotics_bytes(cfg: &mut RunConfig) -> anyhow::Result<(Vec<u8>, u8)> {
    json_only(cfg, "asymptotics")?;
    cfg.mode_defaults();
    let k = cfg.exponents()?;
    let spec = cfg.mode_spec()?;
    let tol = cfg.tolerance()?;
    let fit = *cfg.fit.get_or_insert(FitKind::Large);
    let (mut small_time, mut large_time, mut amplitude_bound) = (None, None, None);
    let mut code = 0;
    match fit {
        FitKind::Small => {
            let s_floor = *cfg.s_floor.get_or_insert(-20.0);
            small_time = Some(small_time_fit(&k, &spec, s_floor, tol).context("small-time fit")?);
        }
        FitKind::Large => {
            physical_time_only(cfg, "the large-time fit")?;
            let window = *cfg.window.get_or_insert([10.0 * spec.t0, 20.0 * spec.t0]);
            let to = *cfg.to.get_or_insert(window[1]);
            let traj = solve_mode_t(&k, &spec, to, tol).context("solving the mode equation")?;
            let wkb = large_time_fit(&traj, spec.t0, (window[0], window[1]), tol).context("large-time fit")?;
            let bound = amplitude_bound_check(&traj, &wkb).context("amplitude bound")?;
            if !(bound.holds && bound.onset_t <= window[1]) {
                code = EXIT_CHECK;
            }
            large_time = Some(wkb);
            amplitude_bound = Some(bound);
        }
    }
    let report = AsymptoticsReport { schema: ASYMPTOTICS_SCHEMA, config: cfg, fit, small_time, large_time, amplitude_bound };
    Ok((json(&report), code))
}

pub fn asymptotics(mut cfg: RunConfig) -> anyhow::Result<u8> {
    let (bytes, code) = asymptotics_bytes(&mut cfg)?;
    emit(&bytes, cfg.out.as_deref())?;
    Ok(code)
}

#[derive(Serialize)]
struct ManifestEntry {
    index: usize,
    w: [f64; 3],
    status: &'static str,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sha256: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    runs: Vec<ManifestEntry>,
}

pub fn sweep(mut cfg: RunConfig) -> anyhow::Result<u8> {
    let dir = cfg.out.clone().ok_or(UsageError::Missing("out"))?;
    cfg.sweep_spacing.get_or_insert(Spacing::Linear);
    let grid = cfg.sweep_grid()?;
    let task = *cfg.task.get_or_insert(Task::Solve);
    cfg.mode_defaults();
    cfg.exponents()?;
    let ext = match (task, cfg.format) {
        (Task::Asymptotics, _) | (Task::Solve, Some(Format::Json)) => "json",
        (Task::Solve, _) => "csv",
    };
    let results: Vec<anyhow::Result<(Vec<u8>, u8)>> = grid
        .par_iter()
        .map(|&w| {
            let mut run = RunConfig { w: Some(w), out: None, ..cfg.clone() };
            run.task = None;
            run.sweep_min = None;
            run.sweep_max = None;
            run.sweep_count = None;
            run.sweep_spacing = None;
            match task {
                Task::Solve => solve_bytes(&mut run).map(|b| (b, 0)),
                Task::Asymptotics => asymptotics_bytes(&mut run),
            }
        })
        .collect();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut runs = Vec::with_capacity(grid.len());
    let mut worst = 0;
    for (index, (w, result)) in grid.iter().zip(results).enumerate() {
        let entry = match result {
            Ok((bytes, code)) => {
                let name = format!("run_{index:04}.{ext}");
                write_file(&dir.join(&name), &bytes)?;
                worst = worst.max(code);
                ManifestEntry {
                    index,
                    w: *w,
                    status: if code == 0 { "ok" } else { "check-failed" },
                    exit_code: code,
                    file: Some(name),
                    sha256: Some(sha256_hex(&bytes)),
                    error: None,
                }
            }
            Err(err) => {
                let code = exit_code(&err);
                worst = worst.max(code);
                ManifestEntry { index, w: *w, status: "error", exit_code: code, file: None, sha256: None, error: Some(format!("{err:#}")) }
            }
        };
        runs.push(entry);
    }
    let manifest = json(&Manifest { schema: SWEEP_SCHEMA, config: &cfg, runs });
    write_file(&dir.join("manifest.json"), &manifest)?;
    Ok(worst)
}

fn write_file(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct GeodesicReport<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    conserved: bool,
    record: &'a GeodesicRecord,
}

pub fn geodesic(mut cfg: RunConfig) -> anyhow::Result<u8> {
    let k = cfg.exponents()?;
    let v = cfg.v.ok_or(UsageError::Missing("v"))?;
    let x0 = *cfg.x0.get_or_insert([0.0; 3]);
    let t0 = *cfg.t0.get_or_insert(1.0);
    let tol = *cfg.tol.get_or_insert(1e-10);
    cfg.tolerance()?;
    let to = *cfg.to.get_or_insert(100.0 * t0);
    let format = *cfg.format.get_or_insert(Format::Csv);
    let init = GeodesicInit::new(t0, x0, v)?;
    let start = init_lightlike(&k, &init)?;
    let span = affine_span(&k, &start.momenta, t0, cfg.required("to", Some(to))?, tol)?;
    let record = integrate_geodesic(&k, &init, (0.0, span), tol)?;
    let conserved = record.max_null_deviation <= 10.0 * tol && record.max_momentum_drift <= 10.0 * tol;
    let bytes = match format {
        Format::Json => json(&GeodesicReport { schema: GEODESIC_SCHEMA, config: &cfg, conserved, record: &record }),
        Format::Csv => {
            let header = ["s", "t", "x1", "x2", "x3", "tdot", "xdot1", "xdot2", "xdot3", "null_deviation", "momentum_drift"];
            let mut csv = Csv::new(GEODESIC_SCHEMA, &cfg, &header);
            for s in &record.samples {
                csv.numbers(&[
                    s.s,
                    s.t,
                    s.x[0],
                    s.x[1],
                    s.x[2],
                    s.tdot,
                    s.xdot[0],
                    s.xdot[1],
                    s.xdot[2],
                    s.null_deviation,
                    s.momentum_drift,
                ]);
            }
            csv.into_bytes()
        }
    };
    emit(&bytes, cfg.out.as_deref())?;
    Ok(if conserved { 0 } else { EXIT_CHECK })
}

#[derive(Serialize)]
struct Deviations {
    energy_vs_large_time: f64,
    energy_vs_formula: f64,
    large_time_vs_formula: f64,
}

#[derive(Serialize)]
struct RedshiftOutput<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    report: RedshiftReport,
    deviations: Deviations,
    pass: bool,
}

pub fn redshift(mut cfg: RunConfig) -> anyhow::Result<u8> {
    json_only(&cfg, "redshift")?;
    let k = cfg.exponents()?;
    let a = cfg.momentum()?;
    let tp = cfg.required("tp", cfg.tp)?;
    let tq = cfg.required("tq", cfg.tq)?;
    let h = *cfg.planck.get_or_insert(1.0);
    let report = redshift_report(&k, &a, tp, tq, h)?;
    let rel = |x: f64, y: f64| ((1.0 + x) - (1.0 + y)).abs() / (1.0 + x).min(1.0 + y);
    let deviations = Deviations {
        energy_vs_large_time: rel(report.z_energy, report.z_large_time),
        energy_vs_formula: rel(report.z_energy, report.z_formula),
        large_time_vs_formula: rel(report.z_large_time, report.z_formula),
    };
    let pass = report.max_deviation() <= REDSHIFT_AGREEMENT;
    emit(&json(&RedshiftOutput { schema: REDSHIFT_SCHEMA, config: &cfg, report, deviations, pass }), cfg.out.as_deref())?;
    Ok(if pass { 0 } else { EXIT_CHECK })
}
