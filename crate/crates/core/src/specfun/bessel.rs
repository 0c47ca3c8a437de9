use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use super::dd::{CDd, Dd};
use super::gamma::log_gamma;
use super::{SeriesResult, SpecFunError};

const TERM_CAP: usize = 10_000;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments at or above this use the Hankel expansion when it converges.
const HANKEL_FROM: f64 = 25.0;

fn check_args(x: f64, tol: f64) -> Result<(), SpecFunError> {
    if !(tol > 0.0) {
        return Err(SpecFunError::BadTolerance);
    }
    if !x.is_finite() {
        return Err(SpecFunError::NonFiniteArgument);
    }
    if !(x > 0.0) {
        return Err(SpecFunError::NonPositiveArgument { x });
    }
    Ok(())
}

fn negative_integer(nu: Complex64) -> Option<i64> {
    (nu.im == 0.0 && nu.re < 0.0 && nu.re.fract() == 0.0).then_some(nu.re as i64)
}

fn is_integer(nu: Complex64) -> bool {
    nu.im == 0.0 && nu.re.fract() == 0.0
}

struct Sums {
    value: CDd,
    derivative: CDd,
    terms: usize,
    last: f64,
    abs_sum: f64,
}

/// `Σ_k (-x²/4)^k / (k! (ν+1)_k)` and `Σ_k (2k+ν) (…)_k`, in double-double.
fn ascending(nu: Complex64, x: f64, tol: f64) -> Result<Sums, SpecFunError> {
    let q = -(Dd::new(x) * Dd::new(x)) / Dd::new(4.0);
    let nu_dd = CDd::from(nu);
    let mut term = CDd::ONE;
    let mut value = CDd::ONE;
    let mut derivative = nu_dd;
    let mut abs_sum = 1.0;
    let mut small_run = 0;
    for k in 1..TERM_CAP {
        let kd = Dd::new(k as f64);
        let den = (nu_dd + CDd::from(k as f64)).scale(kd);
        term = term.scale(q) / den;
        value = value + term;
        derivative = derivative + term * (nu_dd + CDd::from(2.0 * k as f64));
        let mag = term.norm();
        abs_sum += mag;
        let past_peak = (k as f64) * (k as f64) > 0.25 * x * x;
        if past_peak && mag <= tol * value.norm() {
            small_run += 1;
            if small_run >= 2 {
                return Ok(Sums { value, derivative, terms: k + 1, last: mag, abs_sum });
            }
        } else {
            small_run = 0;
        }
    }
    Err(SpecFunError::NoConvergence { terms: TERM_CAP, estimate: term.norm() / value.norm() })
}

/// `J_ν(x)` and `J'_ν(x)` from the ascending series.
fn j_series(nu: Complex64, x: f64, tol: f64) -> Result<SeriesResult, SpecFunError> {
    if let Some(n) = negative_integer(nu) {
        let r = j_series(Complex64::new(-nu.re, 0.0), x, tol)?;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(SeriesResult { value: r.value * sign, derivative: r.derivative * sign, ..r });
    }
    let s = ascending(nu, x, tol)?;
    let pre = (nu * (0.5 * x).ln() - log_gamma(nu + 1.0)?).exp();
    let value = pre * s.value.to_c64();
    let derivative = pre * s.derivative.to_c64() / x;
    let sum_mag = s.value.norm().max(f64::MIN_POSITIVE);
    Ok(SeriesResult { value, derivative, terms_used: s.terms, truncation_estimate: s.last / sum_mag, condition: s.abs_sum / sum_mag })
}

struct Hankel {
    h1: Complex64,
    h2: Complex64,
    terms: usize,
    estimate: f64,
}

/// `H^(1)_ν(x)` and `H^(2)_ν(x)` from their asymptotic expansions.
///
/// The series is cut at its smallest term; `None` when that term is not
/// below `tol` relative to the sum.
fn hankel(nu: Complex64, x: f64, tol: f64) -> Option<Hankel> {
    let mu = 4.0 * nu * nu;
    let mut a = Complex64::new(1.0, 0.0);
    let mut even = a;
    let mut odd = Complex64::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    let i = Complex64::new(0.0, 1.0);
    for k in 1..200usize {
        let odd_sq = ((2 * k - 1) * (2 * k - 1)) as f64;
        a = a * (mu - odd_sq) / (8.0 * k as f64 * x);
        let mag = a.norm();
        if mag > prev && odd_sq > mu.norm() {
            return None;
        }
        prev = mag;
        if k % 2 == 0 {
            even += if k % 4 == 0 { a } else { -a };
        } else {
            odd += if k % 4 == 1 { a } else { -a };
        }
        if mag <= tol * even.norm().max(odd.norm()) {
            // e^{±i(x - νπ/2 - π/4)} with the large real part kept separate
            let shift = (-i * (FRAC_PI_2 * nu + FRAC_PI_4)).exp();
            let (sx, cx) = x.sin_cos();
            let amp = (2.0 / (PI * x)).sqrt();
            let e1 = Complex64::new(cx, sx) * shift;
            let e2 = Complex64::new(cx, -sx) / shift;
            let h1 = amp * e1 * (even + i * odd);
            let h2 = amp * e2 * (even - i * odd);
            return Some(Hankel { h1, h2, terms: k + 1, estimate: mag / even.norm().max(odd.norm()) });
        }
    }
    None
}

struct HankelPair {
    j: SeriesResult,
    y: SeriesResult,
}

fn hankel_pair(nu: Complex64, x: f64) -> Option<HankelPair> {
    let tol = 1e-17;
    let h = hankel(nu, x, tol)?;
    let hm = hankel(nu - 1.0, x, tol)?;
    let d1 = hm.h1 - nu / x * h.h1;
    let d2 = hm.h2 - nu / x * h.h2;
    let i = Complex64::new(0.0, 1.0);
    let terms = h.terms + hm.terms;
    let estimate = h.estimate.max(hm.estimate);
    let j = SeriesResult {
        value: 0.5 * (h.h1 + h.h2),
        derivative: 0.5 * (d1 + d2),
        terms_used: terms,
        truncation_estimate: estimate,
        condition: 1.0,
    };
    let y = SeriesResult {
        value: (h.h1 - h.h2) / (2.0 * i),
        derivative: (d1 - d2) / (2.0 * i),
        terms_used: terms,
        truncation_estimate: estimate,
        condition: 1.0,
    };
    Some(HankelPair { j, y })
}

fn use_hankel(x: f64) -> bool {
    x >= HANKEL_FROM
}

/// Bessel function of the first kind `J_ν(x)` for complex order and real
/// `x > 0`, with its derivative in `x`.
///
/// The ascending series is summed in double-double precision; for large
/// arguments the Hankel expansion takes over.
pub fn bessel_j(nu: Complex64, x: f64, tol: f64) -> Result<SeriesResult, SpecFunError> {
    check_args(x, tol)?;
    if use_hankel(x) {
        if let Some(p) = hankel_pair(nu, x) {
            return Ok(p.j);
        }
    }
    j_series(nu, x, tol).and_then(|r| r.within(tol))
}

/// Bessel function of the second kind `Y_ν(x)` with its derivative.
///
/// Non-integer orders use the connection formula with `J_{±ν}`; `ν = 0`
/// uses the logarithmic series. Other integer orders are not supported.
pub fn bessel_y(nu: Complex64, x: f64, tol: f64) -> Result<SeriesResult, SpecFunError> {
    check_args(x, tol)?;
    let zero = nu == Complex64::new(0.0, 0.0);
    if is_integer(nu) && !zero {
        return Err(SpecFunError::IntegerOrderUnsupported { order: nu.re });
    }
    if use_hankel(x) {
        if let Some(p) = hankel_pair(nu, x) {
            return Ok(p.y);
        }
    }
    if zero {
        return y0_series(x, tol).and_then(|r| r.within(tol));
    }
    let jp = j_series(nu, x, tol)?;
    let jm = j_series(-nu, x, tol)?;
    let arg = PI * nu;
    let (c, s) = (arg.cos(), arg.sin());
    let value = (jp.value * c - jm.value) / s;
    let derivative = (jp.derivative * c - jm.derivative) / s;
    let scale = (jp.value.norm() * c.norm() + jm.value.norm()) / (s.norm() * value.norm().max(f64::MIN_POSITIVE));
    SeriesResult {
        value,
        derivative,
        terms_used: jp.terms_used + jm.terms_used,
        truncation_estimate: jp.truncation_estimate.max(jm.truncation_estimate),
        condition: jp.condition.max(jm.condition) * scale,
    }
    .within(tol)
}

/// `Y_0` from `(2/π)(ln(x/2) + γ) J_0(x) + (2/π) Σ_{k≥1} (-1)^{k+1} H_k (x²/4)^k / (k!)²`.
fn y0_series(x: f64, tol: f64) -> Result<SeriesResult, SpecFunError> {
    let q = Dd::new(x) * Dd::new(x) / Dd::new(4.0);
    let mut term = Dd::new(1.0);
    let mut harmonic = Dd::ZERO;
    let mut j0 = Dd::new(1.0);
    let mut j0d = Dd::ZERO;
    let mut s = Dd::ZERO;
    let mut sd = Dd::ZERO;
    let mut abs_sum = 0.0;
    let mut small_run = 0;
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    for k in 1..TERM_CAP {
        let kd = Dd::new(k as f64);
        term = -(term * q) / (kd * kd);
        harmonic = harmonic + Dd::new(1.0) / kd;
        let two_k = Dd::new(2.0 * k as f64);
        j0 = j0 + term;
        j0d = j0d + term * two_k;
        let h_term = -(harmonic * term);
        s = s + h_term;
        sd = sd + h_term * two_k;
        let mag = h_term.to_f64().abs().max(term.to_f64().abs());
        abs_sum += mag;
        let past_peak = (k as f64) * (k as f64) > q.to_f64();
        let approx = (lg * j0.to_f64() + s.to_f64()).abs();
        if past_peak && mag * (1.0 + lg.abs()) <= tol * approx {
            small_run += 1;
            if small_run >= 2 {
                let (j0, j0d, s, sd) = (j0.to_f64(), j0d.to_f64() / x, s.to_f64(), sd.to_f64() / x);
                let value = 2.0 / PI * (lg * j0 + s);
                let derivative = 2.0 / PI * (j0 / x + lg * j0d + sd);
                return Ok(SeriesResult {
                    value: Complex64::new(value, 0.0),
                    derivative: Complex64::new(derivative, 0.0),
                    terms_used: k + 1,
                    truncation_estimate: mag * (1.0 + lg.abs()) / approx.max(f64::MIN_POSITIVE),
                    condition: abs_sum / value.abs().max(f64::MIN_POSITIVE),
                });
            }
        } else {
            small_run = 0;
        }
    }
    Err(SpecFunError::NoConvergence { terms: TERM_CAP, estimate: f64::NAN })
}
