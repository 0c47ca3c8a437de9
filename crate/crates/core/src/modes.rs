//! Mode solutions `α_ω(t)` in physical time and `β_ω(s) = α_ω(e^s)` in log
//! time, plus the monotone energy `E(s) = β'² + K_ω β²`.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrate::{solve_ivp, Coefficients, IntegrateError, IvpProblem, SampledSolution};
use crate::kasner::{frequency_sq, potential_k, KasnerExponents, Momentum};

/// Physical-time solves refuse to go below this fraction of `t0`.
pub const T_FLOOR_FRACTION: f64 = 1e-8;

/// Default sample density of [`ModeTrajectory::samples`].
pub const SAMPLES_PER_DECADE: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModeError {
    #[error("anchor time t0 must be positive and finite, got {0}")]
    BadAnchor(f64),
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("physical-time span reaches t = {t_end:e}, below the floor {floor:e}; solve in log time instead")]
    SpanBelowFloor { t_end: f64, floor: f64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("trajectory is not real-valued; select the real or imaginary part")]
    ComplexInput,
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
}

/// Momentum, anchor time and initial data `(α(t0), α'(t0))` of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub w: Momentum,
    pub t0: f64,
    pub alpha0: Complex64,
    pub alphadot0: Complex64,
}

impl ModeSpec {
    pub fn new(w: Momentum, t0: f64, alpha0: Complex64, alphadot0: Complex64) -> Result<Self, ModeError> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(ModeError::BadAnchor(t0));
        }
        Ok(ModeSpec { w, t0, alpha0, alphadot0 })
    }

    /// Initial data in log time: `(β(ln t0), β'(ln t0)) = (α(t0), t0 α'(t0))`.
    pub fn log_time_data(&self) -> (Complex64, Complex64) {
        (self.alpha0, self.t0 * self.alphadot0)
    }

    fn scale(&self) -> f64 {
        let s = self.alpha0.norm().max(self.t0 * self.alphadot0.norm());
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coordinate {
    #[serde(rename = "t")]
    PhysicalTime,
    #[serde(rename = "s")]
    LogTime,
}

impl Coordinate {
    pub fn label(&self) -> &'static str {
        match self {
            Coordinate::PhysicalTime => "t",
            Coordinate::LogTime => "s",
        }
    }
}

/// Which real solution to use when a complex trajectory is split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    Real,
    Imag,
}

impl Part {
    fn of(self, z: Complex64) -> f64 {
        match self {
            Part::Real => z.re,
            Part::Imag => z.im,
        }
    }
}

/// One sample of a trajectory in its view coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSample {
    pub x: f64,
    pub value: Complex64,
    pub derivative: Complex64,
}

/// A solved mode with dense evaluation.
///
/// The solver output lives in its native coordinate; `coordinate` is the
/// view in which values and derivatives are reported.
#[derive(Debug, Clone)]
pub struct ModeTrajectory {
    coordinate: Coordinate,
    native: Coordinate,
    solution: SampledSolution,
    exponents: KasnerExponents,
    spec: ModeSpec,
    rtol: f64,
    atol: f64,
}

fn tolerances(spec: &ModeSpec, tol: f64) -> Result<(f64, f64), ModeError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(ModeError::BadTolerance(tol));
    }
    Ok((tol, 1e-2 * tol * spec.scale()))
}

/// Solve `α'' + α'/t + 4π² Σ ω_j² t^{-2p_j} α = 0` from `t0` to `t_end`.
pub fn solve_mode_t(k: &KasnerExponents, spec: &ModeSpec, t_end: f64, tol: f64) -> Result<ModeTrajectory, ModeError> {
    if !(t_end > 0.0) {
        return Err(ModeError::NonPositiveTime(t_end));
    }
    let floor = T_FLOOR_FRACTION * spec.t0;
    if t_end < floor {
        return Err(ModeError::SpanBelowFloor { t_end, floor });
    }
    let (rtol, atol) = tolerances(spec, tol)?;
    let (kk, w) = (*k, spec.w);
    let coeff = move |t: f64| {
        let stiff = 4.0 * PI * PI * frequency_sq(&kk, &w, t);
        Coefficients::homogeneous(Complex64::new(1.0 / t, 0.0), Complex64::new(stiff, 0.0))
    };
    let problem = IvpProblem::new(coeff, spec.t0, spec.alpha0, spec.alphadot0, t_end, rtol, atol);
    let solution = solve_ivp(&problem)?;
    Ok(ModeTrajectory {
        coordinate: Coordinate::PhysicalTime,
        native: Coordinate::PhysicalTime,
        solution,
        exponents: *k,
        spec: *spec,
        rtol,
        atol,
    })
}

/// Solve `β'' + K_ω(s) β = 0` from `ln t0` to `s_end`.
pub fn solve_mode_s(k: &KasnerExponents, spec: &ModeSpec, s_end: f64, tol: f64) -> Result<ModeTrajectory, ModeError> {
    if !s_end.is_finite() {
        return Err(IntegrateError::NonFiniteSpan.into());
    }
    let (rtol, atol) = tolerances(spec, tol)?;
    let (kk, w) = (*k, spec.w);
    let coeff = move |s: f64| Coefficients::homogeneous(Complex64::new(0.0, 0.0), Complex64::new(potential_k(&kk, &w, s), 0.0));
    let (b0, db0) = spec.log_time_data();
    let problem = IvpProblem::new(coeff, spec.t0.ln(), b0, db0, s_end, rtol, atol);
    let solution = solve_ivp(&problem)?;
    Ok(ModeTrajectory { coordinate: Coordinate::LogTime, native: Coordinate::LogTime, solution, exponents: *k, spec: *spec, rtol, atol })
}

/// View a trajectory in the other time coordinate.
///
/// `α(t) = β(ln t)` and `α'(t) = β'(ln t)/t`; the underlying solution is
/// shared, so converting back is exact.
pub fn convert_trajectory(traj: &ModeTrajectory, target: Coordinate) -> ModeTrajectory {
    ModeTrajectory { coordinate: target, ..traj.clone() }
}

impl ModeTrajectory {
    pub fn coordinate(&self) -> Coordinate {
        self.coordinate
    }

    pub fn native_coordinate(&self) -> Coordinate {
        self.native
    }

    pub fn exponents(&self) -> &KasnerExponents {
        &self.exponents
    }

    pub fn spec(&self) -> &ModeSpec {
        &self.spec
    }

    pub fn rtol(&self) -> f64 {
        self.rtol
    }

    pub fn atol(&self) -> f64 {
        self.atol
    }

    pub fn solution(&self) -> &SampledSolution {
        &self.solution
    }

    fn to_native(&self, x: f64) -> f64 {
        match (self.coordinate, self.native) {
            (Coordinate::PhysicalTime, Coordinate::LogTime) => x.ln(),
            (Coordinate::LogTime, Coordinate::PhysicalTime) => x.exp(),
            _ => x,
        }
    }

    fn native_to_view(&self, x: f64) -> f64 {
        match (self.coordinate, self.native) {
            (Coordinate::PhysicalTime, Coordinate::LogTime) => x.exp(),
            (Coordinate::LogTime, Coordinate::PhysicalTime) => x.ln(),
            _ => x,
        }
    }

    /// Range in the view coordinate.
    pub fn range(&self) -> (f64, f64) {
        let (a, b) = self.solution.range();
        (self.native_to_view(a), self.native_to_view(b))
    }

    /// Value and derivative with respect to the view coordinate.
    pub fn eval(&self, x: f64) -> Option<(Complex64, Complex64)> {
        let n = self.to_native(x);
        let (lo, hi) = self.solution.range();
        let n = if n < lo && n > lo - 1e-12 * lo.abs().max(1.0) {
            lo
        } else if n > hi && n < hi + 1e-12 * hi.abs().max(1.0) {
            hi
        } else {
            n
        };
        let (y, dy) = self.solution.eval(n)?;
        let dy = match (self.coordinate, self.native) {
            (Coordinate::PhysicalTime, Coordinate::LogTime) => dy / x,
            (Coordinate::LogTime, Coordinate::PhysicalTime) => dy * n,
            _ => dy,
        };
        Some((y, dy))
    }

    /// Samples on a grid uniform in `s = ln t`, `per_decade` points per
    /// factor of ten in `t`, both ends included.
    pub fn samples_with(&self, per_decade: usize) -> Vec<ModeSample> {
        let (a, b) = self.solution.range();
        let (sa, sb) = match self.native {
            Coordinate::LogTime => (a, b),
            Coordinate::PhysicalTime => (a.ln(), b.ln()),
        };
        let n = (((sb - sa) / LN_10) * per_decade.max(1) as f64).ceil().max(1.0) as usize;
        (0..=n)
            .map(|i| {
                let s = if i == n { sb } else { sa + (sb - sa) * i as f64 / n as f64 };
                let x = match self.coordinate {
                    Coordinate::LogTime => s,
                    Coordinate::PhysicalTime => match self.native {
                        Coordinate::PhysicalTime if i == 0 => a,
                        Coordinate::PhysicalTime if i == n => b,
                        _ => s.exp(),
                    },
                };
                let (value, derivative) = self.eval(x).expect("grid lies inside the solved range");
                ModeSample { x, value, derivative }
            })
            .collect()
    }

    pub fn samples(&self) -> Vec<ModeSample> {
        self.samples_with(SAMPLES_PER_DECADE)
    }

    /// Solver nodes in the view coordinate.
    pub fn nodes(&self) -> Vec<ModeSample> {
        self.solution
            .nodes()
            .map(|(n, y, dy)| {
                let x = self.native_to_view(n);
                let derivative = match (self.coordinate, self.native) {
                    (Coordinate::PhysicalTime, Coordinate::LogTime) => dy / x,
                    (Coordinate::LogTime, Coordinate::PhysicalTime) => dy * n,
                    _ => dy,
                };
                ModeSample { x, value: y, derivative }
            })
            .collect()
    }

    /// Largest `|Im| / |value|` over the samples.
    pub fn imaginary_fraction(&self) -> f64 {
        self.samples()
            .iter()
            .map(|s| {
                let m = s.value.norm().max(s.derivative.norm());
                if m == 0.0 {
                    0.0
                } else {
                    s.value.im.abs().max(s.derivative.im.abs()) / m
                }
            })
            .fold(0.0, f64::max)
    }
}

/// `E(s) = β'(s)² + K_ω(s) β(s)²` at the log-time samples.
///
/// Complex trajectories must name the part to use; with `None` the
/// trajectory has to be real to within `1e-12` of its magnitude.
pub fn energy_functional(traj: &ModeTrajectory, part: Option<Part>) -> Result<Vec<(f64, f64)>, ModeError> {
    let part = match part {
        Some(p) => p,
        None if traj.imaginary_fraction() <= 1e-12 => Part::Real,
        None => return Err(ModeError::ComplexInput),
    };
    let view = convert_trajectory(traj, Coordinate::LogTime);
    let (k, w) = (traj.exponents, traj.spec.w);
    Ok(view
        .samples()
        .into_iter()
        .map(|smp| {
            let b = part.of(smp.value);
            let db = part.of(smp.derivative);
            (smp.x, db * db + potential_k(&k, &w, smp.x) * b * b)
        })
        .collect())
}
