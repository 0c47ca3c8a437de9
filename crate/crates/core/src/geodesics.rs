//! Lightlike geodesics, their conserved momenta, and the redshift measured
//! by the comoving observer `∂_t`.
//!
//! The affine parameter is `s`. The second-order geodesic system is
//! integrated directly; the null condition and `a_j = t^{2p_j} ẋ^j` are
//! recorded as checks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrate::{adaptive_quad, integrate, DenseSolution, IntegrateError, SolverOptions};
use crate::kasner::{frequency_f, KasnerExponents, Momentum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeodesicError {
    #[error("initial direction is zero")]
    ZeroDirection,
    #[error("momentum is zero")]
    ZeroMomentum,
    #[error("redshift needs 0 < t_p < t_q, got t_p = {t_p}, t_q = {t_q}")]
    BadOrdering { t_p: f64, t_q: f64 },
    #[error("time must be positive and finite, got {0}")]
    BadTime(f64),
    #[error("Planck scale must be positive and finite, got {0}")]
    BadPlanck(f64),
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("step size underflow near s = {at}; the geodesic is approaching t = 0")]
    StepUnderflow { at: f64 },
    #[error(transparent)]
    Integrate(IntegrateError),
}

impl From<IntegrateError> for GeodesicError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::StepUnderflow { at, .. } | IntegrateError::NonFiniteState { at } => GeodesicError::StepUnderflow { at },
            other => GeodesicError::Integrate(other),
        }
    }
}

/// Starting event and initial spatial direction (coordinate components).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicInit {
    pub t0: f64,
    pub x0: [f64; 3],
    pub v: [f64; 3],
}

impl GeodesicInit {
    pub fn new(t0: f64, x0: [f64; 3], v: [f64; 3]) -> Result<Self, GeodesicError> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(GeodesicError::BadTime(t0));
        }
        if v.iter().all(|&c| c == 0.0) {
            return Err(GeodesicError::ZeroDirection);
        }
        Ok(GeodesicInit { t0, x0, v })
    }
}

/// Future-pointing null tangent at the starting event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LightlikeStart {
    pub tdot: f64,
    pub xdot: [f64; 3],
    pub momenta: Momentum,
}

/// `ṫ = (Σ v_j² t₀^{2p_j})^{1/2}`, `ẋ = v`, `a_j = t₀^{2p_j} v_j`.
pub fn init_lightlike(k: &KasnerExponents, init: &GeodesicInit) -> Result<LightlikeStart, GeodesicError> {
    let init = GeodesicInit::new(init.t0, init.x0, init.v)?;
    let p = k.p();
    let scale: [f64; 3] = std::array::from_fn(|j| init.t0.powf(2.0 * p[j]));
    let tdot = (0..3).map(|j| init.v[j] * init.v[j] * scale[j]).sum::<f64>().sqrt();
    let a = std::array::from_fn(|j| scale[j] * init.v[j]);
    Ok(LightlikeStart { tdot, xdot: init.v, momenta: Momentum(a) })
}

/// Metric norm `−ṫ² + Σ t^{2p_j}(ẋ^j)²`.
pub fn null_norm(k: &KasnerExponents, t: f64, tdot: f64, xdot: &[f64; 3]) -> f64 {
    let p = k.p();
    let spatial: f64 = (0..3).map(|j| t.powf(2.0 * p[j]) * xdot[j] * xdot[j]).sum();
    spatial - tdot * tdot
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSample {
    pub s: f64,
    pub t: f64,
    pub x: [f64; 3],
    pub tdot: f64,
    pub xdot: [f64; 3],
    /// `|⟨γ', γ'⟩| / ṫ(s₀)²`.
    pub null_deviation: f64,
    /// `max_j |t^{2p_j} ẋ^j − a_j| / max_j |a_j|`.
    pub momentum_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicRecord {
    pub exponents: [f64; 3],
    pub init: GeodesicInit,
    pub momenta: Momentum,
    pub tol: f64,
    pub samples: Vec<GeodesicSample>,
    pub max_null_deviation: f64,
    pub max_momentum_drift: f64,
    #[serde(skip)]
    k: KasnerExponents,
    #[serde(skip)]
    tdot0: f64,
    #[serde(skip)]
    dense: DenseSolution<8>,
}

impl GeodesicRecord {
    /// Dense state at affine parameter `s`; `None` outside the integrated span.
    pub fn state_at(&self, s: f64) -> Option<GeodesicSample> {
        self.dense.eval(s).map(|y| sample(&self.k, &self.momenta, self.tdot0, s, &y))
    }

    pub fn span(&self) -> (f64, f64) {
        (self.dense.x_min(), self.dense.x_max())
    }
}

fn sample(k: &KasnerExponents, a: &Momentum, tdot0: f64, s: f64, y: &[f64; 8]) -> GeodesicSample {
    let p = k.p();
    let (t, tdot) = (y[0], y[4]);
    let xdot = [y[5], y[6], y[7]];
    let a_max = a.0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let drift = (0..3).map(|j| (t.powf(2.0 * p[j]) * xdot[j] - a.0[j]).abs()).fold(0.0, f64::max);
    GeodesicSample {
        s,
        t,
        x: [y[1], y[2], y[3]],
        tdot,
        xdot,
        null_deviation: null_norm(k, t, tdot, &xdot).abs() / (tdot0 * tdot0),
        momentum_drift: drift / a_max,
    }
}

/// Integrate from `s_span.0` (where the initial data sit) to `s_span.1`.
pub fn integrate_geodesic(k: &KasnerExponents, init: &GeodesicInit, s_span: (f64, f64), tol: f64) -> Result<GeodesicRecord, GeodesicError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(GeodesicError::BadTolerance(tol));
    }
    let start = init_lightlike(k, init)?;
    let p = k.p();
    let rhs = |_s: f64, y: &[f64; 8], dy: &mut [f64; 8]| {
        let t = y[0];
        if !(t > 0.0) {
            dy.fill(f64::NAN);
            return;
        }
        dy[..4].copy_from_slice(&y[4..]);
        dy[4] = -(0..3).map(|j| p[j] * t.powf(2.0 * p[j] - 1.0) * y[5 + j] * y[5 + j]).sum::<f64>();
        for j in 0..3 {
            dy[5 + j] = -2.0 * p[j] / t * y[4] * y[5 + j];
        }
    };
    let y0 = [init.t0, init.x0[0], init.x0[1], init.x0[2], start.tdot, start.xdot[0], start.xdot[1], start.xdot[2]];
    let opts = SolverOptions::new(tol, 1e-6 * tol * start.tdot.max(1e-300));
    let dense = integrate(rhs, s_span.0, y0, s_span.1, &opts)?;
    let samples: Vec<_> = dense.xs.iter().zip(&dense.ys).map(|(&s, y)| sample(k, &start.momenta, start.tdot, s, y)).collect();
    let max_null_deviation = samples.iter().map(|x| x.null_deviation).fold(0.0, f64::max);
    let max_momentum_drift = samples.iter().map(|x| x.momentum_drift).fold(0.0, f64::max);
    Ok(GeodesicRecord {
        exponents: p,
        init: *init,
        momenta: start.momenta,
        tol,
        samples,
        max_null_deviation,
        max_momentum_drift,
        k: *k,
        tdot0: start.tdot,
        dense,
    })
}

/// Affine length `∫_{t_a}^{t_b} dt / E(t)` a geodesic with momenta `a`
/// needs to go from `t_a` to `t_b`.
pub fn affine_span(k: &KasnerExponents, a: &Momentum, t_a: f64, t_b: f64, tol: f64) -> Result<f64, GeodesicError> {
    check_momentum(a)?;
    for t in [t_a, t_b] {
        if !(t > 0.0 && t.is_finite()) {
            return Err(GeodesicError::BadTime(t));
        }
    }
    let (lo, hi, sign) = if t_a <= t_b { (t_a, t_b, 1.0) } else { (t_b, t_a, -1.0) };
    if lo == hi {
        return Ok(0.0);
    }
    // substitute t = e^u so a power-law integrand stays smooth over decades
    let len = adaptive_quad(|u| u.exp() / frequency_f(k, a, u.exp()).unwrap_or(f64::NAN), lo.ln(), hi.ln(), tol)?;
    Ok(sign * len)
}

fn check_momentum(a: &Momentum) -> Result<(), GeodesicError> {
    if a.is_zero() {
        Err(GeodesicError::ZeroMomentum)
    } else {
        Ok(())
    }
}

fn check_time(t: f64) -> Result<(), GeodesicError> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(GeodesicError::BadTime(t))
    }
}

/// Energy `E = ṫ = (Σ a_j² / t^{2p_j})^{1/2}` seen by `∂_t`.
pub fn energy(k: &KasnerExponents, a: &Momentum, t: f64) -> Result<f64, GeodesicError> {
    check_momentum(a)?;
    check_time(t)?;
    frequency_f(k, a, t).map_err(|_| GeodesicError::BadTime(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wavelengths {
    /// `h / E`.
    pub lambda_e: f64,
    /// `1 / f_a(t)`.
    pub lambda_lt: f64,
}

pub fn wavelengths(k: &KasnerExponents, a: &Momentum, t: f64, h: f64) -> Result<Wavelengths, GeodesicError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(GeodesicError::BadPlanck(h));
    }
    let e = energy(k, a, t)?;
    let f = frequency_f(k, a, t).map_err(|_| GeodesicError::BadTime(t))?;
    Ok(Wavelengths { lambda_e: h / e, lambda_lt: 1.0 / f })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RedshiftReport {
    pub t_p: f64,
    pub t_q: f64,
    pub h: f64,
    pub z_energy: f64,
    pub z_large_time: f64,
    pub z_formula: f64,
    pub lambda_e: [f64; 2],
    pub lambda_lt: [f64; 2],
}

impl RedshiftReport {
    /// Largest pairwise relative disagreement among the three `1 + z` values.
    pub fn max_deviation(&self) -> f64 {
        let v = [1.0 + self.z_energy, 1.0 + self.z_large_time, 1.0 + self.z_formula];
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in i + 1..3 {
                worst = worst.max((v[i] - v[j]).abs() / v[i].min(v[j]));
            }
        }
        worst
    }
}

/// Redshift between `t_p < t_q` from both wavelength notions and from
/// `(Σ a²/t_p^{2p} / Σ a²/t_q^{2p})^{1/2} − 1`.
pub fn redshift(k: &KasnerExponents, a: &Momentum, t_p: f64, t_q: f64, h: f64) -> Result<RedshiftReport, GeodesicError> {
    check_momentum(a)?;
    check_time(t_p)?;
    check_time(t_q)?;
    if !(t_p < t_q) {
        return Err(GeodesicError::BadOrdering { t_p, t_q });
    }
    let wp = wavelengths(k, a, t_p, h)?;
    let wq = wavelengths(k, a, t_q, h)?;
    let p = k.p();
    let sum = |t: f64| (0..3).map(|j| a.0[j] * a.0[j] / t.powf(2.0 * p[j])).sum::<f64>();
    Ok(RedshiftReport {
        t_p,
        t_q,
        h,
        z_energy: (wq.lambda_e - wp.lambda_e) / wp.lambda_e,
        z_large_time: (wq.lambda_lt - wp.lambda_lt) / wp.lambda_lt,
        z_formula: (sum(t_p) / sum(t_q)).sqrt() - 1.0,
        lambda_e: [wp.lambda_e, wq.lambda_e],
        lambda_lt: [wp.lambda_lt, wq.lambda_lt],
    })
}
