//! Browser bindings for the demo page. Every curve comes back as a flat
//! `Float64Array` of fixed-width rows.

use kasner_modes::asymptotics::{large_time_fit, wkb_envelope, wkb_phase};
use kasner_modes::geodesics::redshift;
use kasner_modes::kasner::{KasnerExponents, Momentum};
use kasner_modes::modes::{solve_mode_t, ModeSpec};
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

const TOL: f64 = 1e-10;

fn triple(xs: &[f64], name: &str) -> Result<[f64; 3], String> {
    <[f64; 3]>::try_from(xs).map_err(|_| format!("{name} needs 3 components, got {}", xs.len()))
}

fn exponents(p: &[f64]) -> Result<KasnerExponents, String> {
    KasnerExponents::from_array(triple(p, "p")?).map_err(|e| e.to_string())
}

fn spec(w: &[f64], t0: f64, alpha0: Complex64, alphadot0: Complex64) -> Result<ModeSpec, String> {
    ModeSpec::new(Momentum(triple(w, "w")?), t0, alpha0, alphadot0).map_err(|e| e.to_string())
}

fn grid(a: f64, b: f64, points: usize, log: bool) -> Vec<f64> {
    let n = points.max(2);
    (0..n)
        .map(|i| {
            let f = i as f64 / (n - 1) as f64;
            if log {
                a * (b / a).powf(f)
            } else {
                a + (b - a) * f
            }
        })
        .collect()
}

/// Rows `[t, Re α, Im α]` on a uniform grid over `[t0, t_end]`.
pub fn trajectory(
    p: &[f64],
    w: &[f64],
    t0: f64,
    alpha0: Complex64,
    alphadot0: Complex64,
    t_end: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let k = exponents(p)?;
    let traj = solve_mode_t(&k, &spec(w, t0, alpha0, alphadot0)?, t_end, TOL).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(3 * points);
    for t in grid(t0, t_end, points, false) {
        let (a, _) = traj.eval(t).ok_or("grid point outside the trajectory")?;
        out.extend([t, a.re, a.im]);
    }
    Ok(out)
}

/// Numerical mode against its fitted WKB tail on `[lo, hi]`.
#[wasm_bindgen]
pub struct WkbComparison {
    residual_sup: f64,
    rows: Vec<f64>,
}

#[wasm_bindgen]
impl WkbComparison {
    /// Fit residual in units of the WKB amplitude.
    #[wasm_bindgen(getter, js_name = residualSup)]
    pub fn residual_sup(&self) -> f64 {
        self.residual_sup
    }

    /// Rows `[t, Re α, Re α_wkb]`.
    pub fn rows(&self) -> Vec<f64> {
        self.rows.clone()
    }
}

#[allow(clippy::too_many_arguments)]
pub fn wkb(
    p: &[f64],
    w: &[f64],
    t0: f64,
    alpha0: Complex64,
    alphadot0: Complex64,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<WkbComparison, String> {
    let k = exponents(p)?;
    let spec = spec(w, t0, alpha0, alphadot0)?;
    let traj = solve_mode_t(&k, &spec, hi, TOL).map_err(|e| e.to_string())?;
    let fit = large_time_fit(&traj, t0, (lo, hi), 1e-12).map_err(|e| e.to_string())?;
    let mut rows = Vec::with_capacity(3 * points);
    for t in grid(lo, hi, points, false) {
        let (a, _) = traj.eval(t).ok_or("grid point outside the trajectory")?;
        let phi = wkb_phase(&k, &spec.w, fit.t0, t, 1e-12).map_err(|e| e.to_string())?;
        let env = wkb_envelope(&k, &spec.w, t).map_err(|e| e.to_string())?;
        let tail = (fit.c1 * Complex64::cis(phi) + fit.c2 * Complex64::cis(-phi)) / env;
        rows.extend([t, a.re, tail.re]);
    }
    Ok(WkbComparison { residual_sup: fit.residual_sup, rows })
}

/// Rows `[t_q, z, z_energy, z_large_time]` on a log grid over `(t_p, t_q_max]`.
pub fn redshift_rows(p: &[f64], a: &[f64], t_p: f64, t_q_max: f64, points: usize) -> Result<Vec<f64>, String> {
    let k = exponents(p)?;
    let a = Momentum(triple(a, "a")?);
    if !(t_p > 0.0 && t_q_max > t_p) {
        return Err(format!("need 0 < t_p < t_q_max, got {t_p} and {t_q_max}"));
    }
    let first = t_p * (t_q_max / t_p).powf(1.0 / points.max(2) as f64);
    let mut out = Vec::with_capacity(4 * points);
    for t_q in grid(first, t_q_max, points, true) {
        let r = redshift(&k, &a, t_p, t_q, 1.0).map_err(|e| e.to_string())?;
        out.extend([t_q, r.z_formula, r.z_energy, r.z_large_time]);
    }
    Ok(out)
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen(js_name = modeTrajectory)]
pub fn mode_trajectory_js(
    p: &[f64],
    w: &[f64],
    t0: f64,
    alpha0: &[f64],
    alphadot0: &[f64],
    t_end: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    trajectory(p, w, t0, complex(alpha0)?, complex(alphadot0)?, t_end, points).map_err(js)
}

#[wasm_bindgen(js_name = wkbComparison)]
#[allow(clippy::too_many_arguments)]
pub fn wkb_comparison_js(
    p: &[f64],
    w: &[f64],
    t0: f64,
    alpha0: &[f64],
    alphadot0: &[f64],
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<WkbComparison, JsError> {
    wkb(p, w, t0, complex(alpha0)?, complex(alphadot0)?, lo, hi, points).map_err(js)
}

#[wasm_bindgen(js_name = redshiftCurve)]
pub fn redshift_curve_js(p: &[f64], a: &[f64], t_p: f64, t_q_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    redshift_rows(p, a, t_p, t_q_max, points).map_err(js)
}

fn complex(xs: &[f64]) -> Result<Complex64, JsError> {
    match xs {
        [re, im] => Ok(Complex64::new(*re, *im)),
        _ => Err(JsError::new("complex values need 2 components")),
    }
}
