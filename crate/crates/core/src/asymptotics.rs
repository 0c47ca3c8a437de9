//! Small-time and large-time behaviour of modes: logarithmic or phase-pair
//! tails as `t → 0`, and the WKB form `α ≈ (c₁e^{iφ} + c₂e^{-iφ}) / envelope`
//! with `φ = 2π ∫ f_ω` as `t → ∞`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrate::{adaptive_quad, IntegrateError};
use crate::kasner::{frequency_sq, potential_k_derivs, KasnerClass, KasnerExponents, Momentum};
use crate::modes::{convert_trajectory, solve_mode_s, Coordinate, ModeError, ModeSpec, ModeTrajectory, SAMPLES_PER_DECADE};

/// Width in `s` of the window a small-time fit is judged on.
pub const SMALL_TIME_WINDOW: f64 = 5.0;

/// Minimum samples per oscillation in phase-resampled grids.
pub const SAMPLES_PER_CYCLE: usize = 16;

const MIN_FIT_SAMPLES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("momentum is zero; the mode does not oscillate")]
    ZeroMomentum,
    #[error("s_floor = {s_floor} must lie at least {SMALL_TIME_WINDOW} below ln t0 = {ln_t0}")]
    FloorTooShallow { s_floor: f64, ln_t0: f64 },
    #[error("small-time residual did not decrease with depth ({shallow:e} at s_floor, {deeper:e} five units deeper)")]
    RegimeMismatch { shallow: f64, deeper: f64 },
    #[error("phase advances only {advance} rad over the window; at least π is needed")]
    IllConditionedFit { advance: f64 },
    #[error("window [{lo}, {hi}] is empty or outside the trajectory range [{min}, {max}]")]
    BadWindow { lo: f64, hi: f64, min: f64, max: f64 },
    #[error("phase needs 0 < t0 <= t, got t0 = {t0}, t = {t}")]
    BadPhaseInterval { t0: f64, t: f64 },
    #[error("trajectory is not real-valued")]
    ComplexInput,
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
}

/// Constants of the tail as `t → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum SmallTimeRegime {
    /// `α ≈ c₁ ln t + c₂`.
    Logarithmic { c1: Complex64, c2: Complex64 },
    /// `α ≈ c₁ e^{2πiω ln t} + c₂ e^{-2πiω ln t}` with `ω` the flat-axis momentum.
    Oscillatory { c1: Complex64, c2: Complex64, frequency: f64 },
}

impl SmallTimeRegime {
    /// Value of the asymptotic form at `s = ln t`.
    pub fn eval(&self, s: f64) -> Complex64 {
        match *self {
            SmallTimeRegime::Logarithmic { c1, c2 } => c1 * s + c2,
            SmallTimeRegime::Oscillatory { c1, c2, frequency } => {
                let e = Complex64::from_polar(1.0, 2.0 * PI * frequency * s);
                c1 * e + c2 / e
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallTimeFit {
    pub regime: SmallTimeRegime,
    pub s_floor: f64,
    /// Largest deviation from the asymptotic form on `[s_floor, s_floor + 5]`.
    pub residual_sup: f64,
    /// The same with the floor moved five units deeper.
    pub deeper_residual_sup: f64,
}

/// Least-squares WKB constants on a window `[onset_t, window_end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WkbFit {
    pub c1: Complex64,
    pub c2: Complex64,
    pub onset_t: f64,
    pub window_end: f64,
    /// Largest `|α·envelope − (c₁e^{iφ} + c₂e^{-iφ})|` over the samples.
    pub residual_sup: f64,
    /// Phase reference: `φ(t) = 2π ∫_{t0}^t f_ω`.
    pub t0: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeBound {
    /// First sample from which `|α| <= (|c₁| + |c₂| + 1)/envelope` holds to
    /// the end of the trajectory.
    pub onset_t: f64,
    pub holds: bool,
}

/// Slowest decay rate of `K_ω(s)` as `s → −∞` among active directions.
fn lambda_min(k: &KasnerExponents, w: &Momentum) -> Option<f64> {
    let rates = k.rates();
    let w = w.components();
    (0..3).filter(|&j| w[j] != 0.0 && rates[j] > 0.0).map(|j| rates[j]).reduce(f64::min)
}

/// `(Σ ω_j² t^{2−2p_j})^{1/4}`.
pub fn wkb_envelope(k: &KasnerExponents, w: &Momentum, t: f64) -> Result<f64, AsymptoticsError> {
    if w.is_zero() {
        return Err(AsymptoticsError::ZeroMomentum);
    }
    if !(t > 0.0) {
        return Err(ModeError::NonPositiveTime(t).into());
    }
    let p = k.p();
    let c = w.components();
    let sum: f64 = (0..3).map(|j| c[j] * c[j] * t.powf(2.0 - 2.0 * p[j])).sum();
    Ok(sum.sqrt().sqrt())
}

/// `2π ∫_{t0}^t f_ω(u) du`, in closed form when all active directions share
/// one exponent.
pub fn wkb_phase(k: &KasnerExponents, w: &Momentum, t0: f64, t: f64, tol: f64) -> Result<f64, AsymptoticsError> {
    if !(t0 > 0.0 && t0 <= t && t.is_finite()) {
        return Err(AsymptoticsError::BadPhaseInterval { t0, t });
    }
    if w.is_zero() || t == t0 {
        return Ok(0.0);
    }
    let p = k.p();
    let c = w.components();
    let active: Vec<usize> = (0..3).filter(|&j| c[j] != 0.0).collect();
    let q = p[active[0]];
    if active.iter().all(|&j| p[j] == q) {
        let amp = active.iter().map(|&j| c[j] * c[j]).sum::<f64>().sqrt();
        let integral = if q == 1.0 {
            (t / t0).ln()
        } else {
            let e = 1.0 - q;
            (t.powf(e) - t0.powf(e)) / e
        };
        return Ok(2.0 * PI * amp * integral);
    }
    let integral = adaptive_quad(|u| frequency_sq(k, w, u).sqrt(), t0, t, tol)?;
    Ok(2.0 * PI * integral)
}

/// `ψ_K = K^{-1/4} (K^{-1/4})''` in `s`, from the exact derivatives of `K_ω`.
pub fn wkb_defect(k: &KasnerExponents, w: &Momentum, s: f64) -> Result<f64, AsymptoticsError> {
    if w.is_zero() {
        return Err(AsymptoticsError::ZeroMomentum);
    }
    let [kk, dk, ddk] = potential_k_derivs(k, w, s);
    let l1 = dk / kk;
    Ok((1.25 * l1 * l1 - ddk / kk) / (4.0 * kk.sqrt()))
}

/// Least-squares fit of `c₁e^{iφ} + c₂e^{-iφ}` to `(φ, y)` samples.
fn fit_phase_pair(points: &[(f64, Complex64)]) -> Result<(Complex64, Complex64, f64), AsymptoticsError> {
    let advance = match (points.first(), points.last()) {
        (Some(a), Some(b)) => (b.0 - a.0).abs(),
        _ => 0.0,
    };
    if advance < PI {
        return Err(AsymptoticsError::IllConditionedFit { advance });
    }
    let n = points.len() as f64;
    let mut g12 = Complex64::new(0.0, 0.0);
    let mut r1 = Complex64::new(0.0, 0.0);
    let mut r2 = Complex64::new(0.0, 0.0);
    for &(phi, y) in points {
        let e = Complex64::from_polar(1.0, phi);
        g12 += (e * e).conj();
        r1 += e.conj() * y;
        r2 += e * y;
    }
    // [n, g12; conj(g12), n] (c1, c2) = (r1, r2)
    let det = n * n - g12.norm_sqr();
    let c1 = (n * r1 - g12 * r2) / det;
    let c2 = (n * r2 - g12.conj() * r1) / det;
    let residual = points
        .iter()
        .map(|&(phi, y)| {
            let e = Complex64::from_polar(1.0, phi);
            (y - c1 * e - c2 / e).norm()
        })
        .fold(0.0, f64::max);
    Ok((c1, c2, residual))
}

/// Points `(t, φ(t))` on `[a, b]` evenly spaced in `φ = 2π ∫_{t0}^t f_ω`, at
/// least `per_cycle` per oscillation and `min_points` in total.
pub fn phase_grid(
    k: &KasnerExponents,
    w: &Momentum,
    t0: f64,
    (a, b): (f64, f64),
    per_cycle: usize,
    min_points: usize,
    tol: f64,
) -> Result<Vec<(f64, f64)>, AsymptoticsError> {
    if w.is_zero() {
        return Err(AsymptoticsError::ZeroMomentum);
    }
    let (lo, hi) = if t0 <= a { (t0, a) } else { (a, t0) };
    let phi_a = if t0 <= a { 1.0 } else { -1.0 } * wkb_phase(k, w, lo, hi, tol)?;
    let phi_b = phi_a + wkb_phase(k, w, a, b, tol)?;
    let cycles = (phi_b - phi_a) / (2.0 * PI);
    let n = ((cycles * per_cycle as f64).ceil() as usize).max(min_points).max(1);
    let rate = |t: f64| 2.0 * PI * frequency_sq(k, w, t).sqrt();
    let mut out = Vec::with_capacity(n + 1);
    out.push((a, phi_a));
    let (mut t, mut phi) = (a, phi_a);
    for i in 1..n {
        let target = phi_a + (phi_b - phi_a) * i as f64 / n as f64;
        let mut next = (t + (target - phi) / rate(t)).min(b);
        let mut phi_next = phi + wkb_phase(k, w, t, next, tol)?;
        for _ in 0..4 {
            let step = (target - phi_next) / rate(next);
            if step.abs() <= 1e-14 * next {
                break;
            }
            let cand = (next + step).clamp(t, b);
            phi_next = phi + wkb_phase(k, w, t, cand, tol)?;
            next = cand;
        }
        t = next;
        phi = phi_next;
        out.push((t, phi));
    }
    out.push((b, phi_b));
    Ok(out)
}

fn physical_view(traj: &ModeTrajectory) -> ModeTrajectory {
    convert_trajectory(traj, Coordinate::PhysicalTime)
}

fn value_at(view: &ModeTrajectory, t: f64) -> Result<(Complex64, Complex64), AsymptoticsError> {
    let (min, max) = view.range();
    view.eval(t).ok_or(AsymptoticsError::BadWindow { lo: t, hi: t, min, max })
}

/// Fit the WKB constants on `window` of a solved trajectory.
pub fn large_time_fit(traj: &ModeTrajectory, t0: f64, window: (f64, f64), tol: f64) -> Result<WkbFit, AsymptoticsError> {
    let k = traj.exponents();
    let w = traj.spec().w;
    if w.is_zero() {
        return Err(AsymptoticsError::ZeroMomentum);
    }
    let view = physical_view(traj);
    let (min, max) = view.range();
    let (lo, hi) = window;
    let slack = 1e-12 * max;
    if !(lo > 0.0 && lo < hi && lo >= min - slack && hi <= max + slack) {
        return Err(AsymptoticsError::BadWindow { lo, hi, min, max });
    }
    let grid = phase_grid(k, &w, t0, window, SAMPLES_PER_CYCLE, MIN_FIT_SAMPLES, tol)?;
    let mut points = Vec::with_capacity(grid.len());
    for &(t, phi) in &grid {
        let (a, _) = value_at(&view, t)?;
        points.push((phi, a * wkb_envelope(k, &w, t)?));
    }
    let (c1, c2, residual_sup) = fit_phase_pair(&points)?;
    Ok(WkbFit { c1, c2, onset_t: lo, window_end: hi, residual_sup, t0, samples: points.len() })
}

/// Check `|α(t)| <= (|c₁| + |c₂| + 1)/envelope(t)` on a grid covering the
/// trajectory with at least 16 samples per oscillation.
pub fn amplitude_bound_check(traj: &ModeTrajectory, fit: &WkbFit) -> Result<AmplitudeBound, AsymptoticsError> {
    let k = traj.exponents();
    let w = traj.spec().w;
    let view = physical_view(traj);
    let (min, max) = view.range();
    let decades = (max / min).log10();
    let min_points = (decades * SAMPLES_PER_DECADE as f64).ceil() as usize;
    let grid = phase_grid(k, &w, fit.t0, (min, max), SAMPLES_PER_CYCLE, min_points, 1e-10)?;
    let bound = fit.c1.norm() + fit.c2.norm() + 1.0;
    let mut onset = Some(min);
    for (i, &(t, _)) in grid.iter().enumerate() {
        let (a, _) = value_at(&view, t)?;
        if a.norm() * wkb_envelope(k, &w, t)? > bound {
            onset = grid.get(i + 1).map(|&(t, _)| t);
        }
    }
    Ok(match onset {
        Some(t) => AmplitudeBound { onset_t: t, holds: true },
        None => AmplitudeBound { onset_t: max, holds: false },
    })
}

/// Constants of the small-time tail, judged on `[s_floor, s_floor + 5]` and
/// checked again five units deeper.
///
/// Logarithmic constants are `c₁ = lim β'`, `c₂ = lim (β − c₁s)`, each
/// extrapolated linearly in `e^{λ s}` from `s_floor` and `s_floor + 1`, with
/// `λ` the slowest decay rate of `K_ω`. The flat-axis case fits the phase
/// pair at `2πω s`, which is exact once the transverse terms have decayed.
pub fn small_time_fit(k: &KasnerExponents, spec: &ModeSpec, s_floor: f64, tol: f64) -> Result<SmallTimeFit, AsymptoticsError> {
    let ln_t0 = spec.t0.ln();
    if !(s_floor + SMALL_TIME_WINDOW <= ln_t0) {
        return Err(AsymptoticsError::FloorTooShallow { s_floor, ln_t0 });
    }
    let deep = s_floor - SMALL_TIME_WINDOW;
    let traj = solve_mode_s(k, spec, deep, tol)?;
    let axis_momentum = match k.class() {
        KasnerClass::Flat { axis } if spec.w.components()[axis] != 0.0 => Some(spec.w.components()[axis]),
        _ => None,
    };
    let fit_at = |floor: f64| -> Result<(SmallTimeRegime, f64), AsymptoticsError> {
        match axis_momentum {
            Some(freq) => oscillatory_fit(&traj, floor, freq),
            None => logarithmic_fit(&traj, k, &spec.w, floor),
        }
    };
    let (regime, shallow) = fit_at(s_floor)?;
    let (_, deeper) = fit_at(deep)?;
    let scale = regime.eval(s_floor).norm().max(regime.eval(s_floor + SMALL_TIME_WINDOW).norm()).max(1.0);
    let noise = 1e3 * tol * scale;
    if deeper > shallow && shallow > noise {
        return Err(AsymptoticsError::RegimeMismatch { shallow, deeper });
    }
    Ok(SmallTimeFit { regime, s_floor, residual_sup: shallow, deeper_residual_sup: deeper })
}

fn eval_s(traj: &ModeTrajectory, s: f64) -> Result<(Complex64, Complex64), AsymptoticsError> {
    let (min, max) = traj.range();
    traj.eval(s).ok_or(AsymptoticsError::BadWindow { lo: s, hi: s, min, max })
}

fn window_residual(traj: &ModeTrajectory, floor: f64, regime: &SmallTimeRegime, n: usize) -> Result<f64, AsymptoticsError> {
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        let s = floor + SMALL_TIME_WINDOW * i as f64 / n as f64;
        let (b, _) = eval_s(traj, s)?;
        worst = worst.max((b - regime.eval(s)).norm());
    }
    Ok(worst)
}

fn logarithmic_fit(
    traj: &ModeTrajectory,
    k: &KasnerExponents,
    w: &Momentum,
    floor: f64,
) -> Result<(SmallTimeRegime, f64), AsymptoticsError> {
    let (a, b) = (floor, floor + 1.0);
    let (ya, da) = eval_s(traj, a)?;
    let (yb, db) = eval_s(traj, b)?;
    let extrapolate = |fa: Complex64, fb: Complex64| match lambda_min(k, w) {
        Some(l) => {
            let (xa, xb) = ((l * a).exp(), (l * b).exp());
            fa - (fb - fa) * (xa / (xb - xa))
        }
        None => fa,
    };
    let c1 = extrapolate(da, db);
    let c2 = extrapolate(ya - c1 * a, yb - c1 * b);
    let regime = SmallTimeRegime::Logarithmic { c1, c2 };
    let residual = window_residual(traj, floor, &regime, 500)?;
    Ok((regime, residual))
}

fn oscillatory_fit(traj: &ModeTrajectory, floor: f64, freq: f64) -> Result<(SmallTimeRegime, f64), AsymptoticsError> {
    let nu = 2.0 * PI * freq;
    let cycles = freq.abs() * SMALL_TIME_WINDOW;
    let n = ((cycles * SAMPLES_PER_CYCLE as f64).ceil() as usize).max(500);
    let mut points = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let s = floor + SMALL_TIME_WINDOW * i as f64 / n as f64;
        points.push((nu * s, eval_s(traj, s)?.0));
    }
    let (c1, c2, residual) = fit_phase_pair(&points)?;
    Ok((SmallTimeRegime::Oscillatory { c1, c2, frequency: freq }, residual))
}

/// Phase advance `∫ f_ω`, in cycles, between consecutive zeros of a real
/// trajectory inside `window`.
pub fn zero_crossing_cycles(traj: &ModeTrajectory, window: (f64, f64), tol: f64) -> Result<Vec<f64>, AsymptoticsError> {
    if traj.imaginary_fraction() > 1e-12 {
        return Err(AsymptoticsError::ComplexInput);
    }
    let k = traj.exponents();
    let w = traj.spec().w;
    let view = physical_view(traj);
    let (min, max) = view.range();
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi && lo >= min && hi <= max) {
        return Err(AsymptoticsError::BadWindow { lo, hi, min, max });
    }
    let grid = phase_grid(k, &w, lo, window, SAMPLES_PER_CYCLE, 2, tol)?;
    let re = |t: f64| value_at(&view, t).map(|(a, _)| a.re);
    let mut zeros = Vec::new();
    let mut prev = (grid[0].0, re(grid[0].0)?);
    for &(t, _) in &grid[1..] {
        let v = re(t)?;
        if (prev.1 < 0.0) != (v < 0.0) && prev.1 != 0.0 {
            let (mut a, mut fa, mut b) = (prev.0, prev.1, t);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = re(m)?;
                if (fm < 0.0) == (fa < 0.0) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            zeros.push(0.5 * (a + b));
        }
        prev = (t, v);
    }
    zeros.windows(2).map(|z| Ok(wkb_phase(k, &w, z[0], z[1], tol)? / (2.0 * PI))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kasner::frequency_f;
    use crate::modes::solve_mode_t;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn generic() -> KasnerExponents {
        KasnerExponents::new(-2.0 / 7.0, 3.0 / 7.0, 6.0 / 7.0, 1e-12).unwrap()
    }

    fn third() -> KasnerExponents {
        KasnerExponents::axisymmetric(0)
    }

    #[test]
    fn envelope_examples() {
        let e = wkb_envelope(&KasnerExponents::flat(0), &Momentum::new(0.0, 3.0, 4.0), 1.0).unwrap();
        assert!((e - 5f64.sqrt()).abs() < 1e-15);
        let e = wkb_envelope(&third(), &Momentum::new(1.0, 0.0, 0.0), 8.0).unwrap();
        assert!((e - 4.0).abs() < 1e-14);
        assert!(matches!(wkb_envelope(&third(), &Momentum::ZERO, 1.0), Err(AsymptoticsError::ZeroMomentum)));
    }

    #[test]
    fn phase_examples() {
        let flat = KasnerExponents::flat(0);
        let w = Momentum::new(0.0, 3.0, 4.0);
        let p = wkb_phase(&flat, &w, 2.0, 7.0, 1e-12).unwrap();
        assert!((p - 2.0 * PI * 5.0 * 5.0).abs() < 1e-12);
        let p = wkb_phase(&third(), &Momentum::new(1.0, 0.0, 0.0), 1.0, 8.0, 1e-12).unwrap();
        assert!((p - 2.0 * PI * 0.75 * (16.0 - 1.0)).abs() < 1e-12);
        let p = wkb_phase(&flat, &Momentum::new(2.0, 0.0, 0.0), 1.0, 10.0, 1e-12).unwrap();
        assert!((p - 2.0 * PI * 2.0 * 10f64.ln()).abs() < 1e-12);
        assert!(wkb_phase(&flat, &w, 2.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn mixed_phase_against_romberg() {
        // Romberg on ∫_1^10 sqrt(t^{2/3} + t^{-4/3}) dt, 2^20 panels
        let f = |t: f64| (t.powf(2.0 / 3.0) + t.powf(-4.0 / 3.0)).sqrt();
        let mut r = [[0.0f64; 21]; 21];
        let (a, b) = (1.0, 10.0);
        r[0][0] = 0.5 * (b - a) * (f(a) + f(b));
        for i in 1..21 {
            let n = 1usize << (i - 1);
            let h = (b - a) / (2 * n) as f64;
            let s: f64 = (0..n).map(|j| f(a + (2 * j + 1) as f64 * h)).sum();
            r[i][0] = 0.5 * r[i - 1][0] + h * s;
            for m in 1..=i {
                let q = 4f64.powi(m as i32);
                r[i][m] = (q * r[i][m - 1] - r[i - 1][m - 1]) / (q - 1.0);
            }
        }
        let oracle = 2.0 * PI * r[20][20];
        let p = wkb_phase(&third(), &Momentum::new(1.0, 1.0, 0.0), 1.0, 10.0, 1e-12).unwrap();
        assert!((p - oracle).abs() < 1e-9 * oracle, "{p} {oracle}");
    }

    #[test]
    fn defect_examples() {
        let flat = KasnerExponents::flat(0);
        assert_eq!(wkb_defect(&flat, &Momentum::new(2.0, 0.0, 0.0), 3.0).unwrap(), 0.0);
        let w = Momentum::new(1.0, 0.0, 0.0);
        let lambda = 8.0 / 3.0;
        for s in [-2.0f64, 0.0, 1.5] {
            let kk = 4.0 * PI * PI * (lambda * s).exp();
            let want = lambda * lambda / 16.0 / kk.sqrt();
            assert!((wkb_defect(&third(), &w, s).unwrap() - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn defect_matches_finite_differences() {
        let w = Momentum::new(0.7, 0.4, 0.2);
        let k = generic();
        let g = |s: f64| crate::kasner::potential_k(&k, &w, s).powf(-0.25);
        for s in [-1.0, 0.5, 2.0] {
            let h = 1e-3;
            let dd = (g(s + h) - 2.0 * g(s) + g(s - h)) / (h * h);
            let fd = g(s) * dd;
            let exact = wkb_defect(&k, &w, s).unwrap();
            assert!((fd - exact).abs() < 1e-5 * exact.abs(), "{s} {fd} {exact}");
        }
    }

    #[test]
    fn defect_decay_and_integrability() {
        let k = generic();
        let w = Momentum::new(1.0, 1.0, 0.0);
        let lmin = 2.0 - 2.0 * 3.0 / 7.0;
        let scaled: Vec<f64> = (0..8)
            .map(|i| {
                let s = 2.0 * i as f64;
                wkb_defect(&k, &w, s).unwrap().abs() * (lmin * s / 2.0).exp()
            })
            .collect();
        assert!(scaled.iter().all(|&v| v < 1.0), "{scaled:?}");
        let tail = |a: f64, b: f64| adaptive_quad(|s| wkb_defect(&k, &w, s).unwrap().abs(), a, b, 1e-12).unwrap();
        assert!(tail(30.0, 60.0) < 1e-8);
    }

    #[test]
    fn phase_pair_fit_is_exact_on_exact_data() {
        let (c1, c2) = (c(0.3, -1.0), c(2.0, 0.5));
        let pts: Vec<_> = (0..100)
            .map(|i| {
                let phi = 0.1 * i as f64;
                (phi, c1 * Complex64::from_polar(1.0, phi) + c2 * Complex64::from_polar(1.0, -phi))
            })
            .collect();
        let (a, b, r) = fit_phase_pair(&pts).unwrap();
        assert!((a - c1).norm() < 1e-13 && (b - c2).norm() < 1e-13 && r < 1e-13);
        assert!(matches!(fit_phase_pair(&pts[..20]), Err(AsymptoticsError::IllConditionedFit { .. })));
    }

    #[test]
    fn phase_grid_is_uniform_in_phase() {
        let k = generic();
        let w = Momentum::new(1.0, 1.0, 0.5);
        let g = phase_grid(&k, &w, 1.0, (5.0, 9.0), 16, 10, 1e-12).unwrap();
        let d0 = g[1].1 - g[0].1;
        for p in g.windows(2) {
            assert!(((p[1].1 - p[0].1) - d0).abs() < 1e-8, "{:?}", p);
            let direct = wkb_phase(&k, &w, 1.0, p[1].0, 1e-12).unwrap();
            assert!((direct - p[1].1).abs() < 1e-8);
        }
        assert!(d0 <= 2.0 * PI / 16.0 + 1e-12);
    }

    #[test]
    fn zero_momentum_small_time_is_exact() {
        let spec = ModeSpec::new(Momentum::ZERO, 2.0, c(1.0, 0.5), c(0.25, 0.0)).unwrap();
        let fit = small_time_fit(&third(), &spec, -20.0, 1e-10).unwrap();
        let SmallTimeRegime::Logarithmic { c1, c2 } = fit.regime else { panic!("expected logarithmic") };
        let want1 = 2.0 * spec.alphadot0;
        assert!((c1 - want1).norm() < 1e-12);
        assert!((c2 - (spec.alpha0 - want1 * 2f64.ln())).norm() < 1e-10);
        assert!(fit.residual_sup < 1e-9);
    }

    #[test]
    fn small_time_log_fit_converges_with_depth() {
        let spec = ModeSpec::new(Momentum::new(1.0, 1.0, 0.0), 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let fit = small_time_fit(&generic(), &spec, -20.0, 1e-11).unwrap();
        assert!(fit.residual_sup < 1e-4, "{:e}", fit.residual_sup);
        assert!(fit.deeper_residual_sup < 0.1 * fit.residual_sup);
    }

    #[test]
    fn small_time_flat_axis_is_oscillatory() {
        let spec = ModeSpec::new(Momentum::new(0.5, 0.3, 0.0), 1.0, c(1.0, 0.0), c(0.2, 0.0)).unwrap();
        let fit = small_time_fit(&KasnerExponents::flat(0), &spec, -20.0, 1e-11).unwrap();
        let SmallTimeRegime::Oscillatory { c1, c2, frequency } = fit.regime else { panic!("expected oscillatory") };
        assert_eq!(frequency, 0.5);
        assert!(fit.residual_sup < 1e-6, "{:e}", fit.residual_sup);
        // a real solution pairs conjugate constants
        assert!((c1 - c2.conj()).norm() < 1e-8);
    }

    #[test]
    fn floor_must_be_deep() {
        let spec = ModeSpec::new(Momentum::new(1.0, 0.0, 0.0), 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(matches!(small_time_fit(&third(), &spec, -2.0, 1e-9), Err(AsymptoticsError::FloorTooShallow { .. })));
    }

    #[test]
    fn flat_constant_frequency_is_exact_wkb() {
        let k = KasnerExponents::flat(0);
        let w = Momentum::new(0.0, 0.6, 0.8);
        let spec = ModeSpec::new(w, 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        // axis-only momentum: α = t^{±4πi} exactly
        let w_axis = Momentum::new(2.0, 0.0, 0.0);
        let spec_axis = ModeSpec::new(w_axis, 1.0, c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let tr = solve_mode_t(&k, &spec_axis, 50.0, 1e-11).unwrap();
        let fit = large_time_fit(&tr, 1.0, (10.0, 40.0), 1e-12).unwrap();
        assert!(fit.residual_sup < 1e-8, "{:e}", fit.residual_sup);
        let bound = amplitude_bound_check(&tr, &fit).unwrap();
        assert!(bound.holds && bound.onset_t == 1.0);
        let tr = solve_mode_t(&k, &spec, 40.0, 1e-11).unwrap();
        assert!(large_time_fit(&tr, 1.0, (10.0, 20.0), 1e-12).is_ok());
    }

    #[test]
    fn large_time_residual_decays() {
        let k = third();
        let spec = ModeSpec::new(Momentum::new(1.0, 1.0, 0.0), 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let tr = solve_mode_t(&k, &spec, 100.0, 1e-11).unwrap();
        let early = large_time_fit(&tr, 1.0, (5.0, 10.0), 1e-12).unwrap();
        let late = large_time_fit(&tr, 1.0, (50.0, 100.0), 1e-12).unwrap();
        assert!(late.residual_sup * 10.0 <= early.residual_sup, "{:e} {:e}", early.residual_sup, late.residual_sup);
        let bound = amplitude_bound_check(&tr, &late).unwrap();
        assert!(bound.holds && bound.onset_t <= 100.0);
    }

    #[test]
    fn bessel_constants_stable_across_windows() {
        let k = KasnerExponents::flat(0);
        let spec = ModeSpec::new(Momentum::new(0.3, 1.0, 0.0), 1.0, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let tr = solve_mode_t(&k, &spec, 400.0, 1e-12).unwrap();
        let a = large_time_fit(&tr, 1.0, (100.0, 200.0), 1e-12).unwrap();
        let b = large_time_fit(&tr, 1.0, (200.0, 400.0), 1e-12).unwrap();
        assert!((a.c1.norm() - b.c1.norm()).abs() < 1e-4 && (a.c2.norm() - b.c2.norm()).abs() < 1e-4);
    }

    #[test]
    fn adversarial_bound_fails() {
        let k = third();
        let spec = ModeSpec::new(Momentum::new(1.0, 0.0, 0.0), 1.0, c(3.0, 0.0), c(0.0, 0.0)).unwrap();
        let tr = solve_mode_t(&k, &spec, 30.0, 1e-10).unwrap();
        let mut fit = large_time_fit(&tr, 1.0, (10.0, 30.0), 1e-12).unwrap();
        fit.c1 = c(0.0, 0.0);
        fit.c2 = c(0.0, 0.0);
        assert!(!amplitude_bound_check(&tr, &fit).unwrap().holds);
    }

    #[test]
    fn zero_crossings_advance_half_a_cycle() {
        let k = generic();
        let spec = ModeSpec::new(Momentum::new(0.5, 1.0, 0.3), 1.0, c(1.0, 0.0), c(-0.5, 0.0)).unwrap();
        let tr = solve_mode_t(&k, &spec, 60.0, 1e-11).unwrap();
        let cycles = zero_crossing_cycles(&tr, (20.0, 60.0), 1e-12).unwrap();
        assert!(cycles.len() > 50);
        assert!(cycles.iter().all(|&c| (c - 0.5).abs() <= 0.02), "{cycles:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn envelope_identity(u in 0.05f64..3.0, a in -2.0f64..2.0, b in -2.0f64..2.0, cc in -2.0f64..2.0, t in 0.01f64..100.0) {
            let d = 1.0 + u + u * u;
            let k = KasnerExponents::new(-u / d, (1.0 + u) / d, u * (1.0 + u) / d, 1e-12).unwrap();
            let w = Momentum::new(a, b, cc);
            prop_assume!(!w.is_zero());
            let e = wkb_envelope(&k, &w, t).unwrap();
            let f = frequency_f(&k, &w, t).unwrap();
            prop_assert!((e - (t * f).sqrt()).abs() <= 1e-12 * e);
            let p = k.p();
            let sum: f64 = (0..3).map(|j| w.0[j] * w.0[j] * t.powf(2.0 - 2.0 * p[j])).sum();
            prop_assert!((e.powi(4) - sum).abs() <= 1e-12 * sum);
        }
    }
}
