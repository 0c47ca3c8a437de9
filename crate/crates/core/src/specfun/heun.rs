use std::sync::Mutex;

use num_complex::Complex64;

use super::dd::CDd;
use super::{SeriesResult, SpecFunError};
use crate::integrate::{integrate, DenseSolution, SolverOptions};

const TERM_CAP: usize = 100_000;

/// Biconfluent Heun function `HeunB(0, 0, 0, δ; x)`: the entire solution of
/// `x y'' + (1 - 2x²) y' - (2x + δ/2) y = 0` with `y(0) = 1`.
///
/// Power series `Σ a_n xⁿ` with `a₀ = 1`, `a₁ = δ/2` and
/// `(m+1)² a_{m+1} = (δ/2) a_m + 2m a_{m-1}`, summed in double-double.
pub fn heun_b(delta: Complex64, x: Complex64, tol: f64) -> Result<SeriesResult, SpecFunError> {
    if !(tol > 0.0) {
        return Err(SpecFunError::BadTolerance);
    }
    if !(delta.re.is_finite() && delta.im.is_finite() && x.re.is_finite() && x.im.is_finite()) {
        return Err(SpecFunError::NonFiniteArgument);
    }
    let half_delta = 0.5 * delta;
    if x == Complex64::new(0.0, 0.0) {
        return Ok(SeriesResult {
            value: Complex64::new(1.0, 0.0),
            derivative: half_delta,
            terms_used: 1,
            truncation_estimate: 0.0,
            condition: 1.0,
        });
    }
    let xd = CDd::from(x);
    let x2 = xd * xd;
    let hd = CDd::from(half_delta);
    let ax = x.norm();
    // t_n = a_n xⁿ
    let mut prev = CDd::ONE;
    let mut cur = hd * xd;
    let mut value = prev + cur;
    let mut weighted = cur;
    let mut abs_sum = 1.0 + cur.norm();
    for m in 1..TERM_CAP {
        let mf = m as f64;
        let den = CDd::from((mf + 1.0) * (mf + 1.0));
        let next = (hd * xd * cur + x2 * prev.scale((2.0 * mf).into())) / den;
        value = value + next;
        weighted = weighted + next.scale((mf + 1.0).into());
        let mag = next.norm();
        abs_sum += mag;
        prev = cur;
        cur = next;
        let n = mf + 1.0;
        let ratio = 2.0 * ax * ax / n + 0.5 * delta.norm() * ax / (n * n);
        if ratio < 0.5 {
            let estimate = (prev.norm() + cur.norm()) / (1.0 - ratio) / value.norm().max(f64::MIN_POSITIVE);
            if estimate <= tol {
                let sum = value.to_c64();
                return Ok(SeriesResult {
                    value: sum,
                    derivative: weighted.to_c64() / x,
                    terms_used: m + 2,
                    truncation_estimate: estimate,
                    condition: abs_sum / sum.norm().max(f64::MIN_POSITIVE),
                });
            }
        }
    }
    Err(SpecFunError::NoConvergence { terms: TERM_CAP, estimate: cur.norm() / value.norm() })
}

/// `HeunB(0, 0, 0, δ; x)` along the ray `x = r·e^{iπ/4}`, `r ≥ 0`.
///
/// On this ray `x²` is imaginary, so both solutions of the Heun equation stay
/// of moderate size and the equation can be integrated outward without loss.
/// Near the origin the Maclaurin series is summed directly, on a disk small
/// enough that its terms do not cancel; beyond it the ODE is integrated from
/// the series data and the dense solution is extended on demand.
#[derive(Debug)]
pub struct HeunRay {
    delta: Complex64,
    tol: f64,
    radius: f64,
    near: LocalExpansion,
    start: [f64; 4],
    cache: Mutex<Option<DenseSolution<4>>>,
}

const SERIES_RADIUS: f64 = 1.0;

/// Radius of the directly summed disk: `|δ| r / 2 <= 2`, at most `SERIES_RADIUS`.
fn series_radius(delta: Complex64) -> f64 {
    let hd = 0.5 * delta.norm();
    if hd * SERIES_RADIUS <= 2.0 {
        SERIES_RADIUS
    } else {
        2.0 / hd
    }
}

impl Clone for HeunRay {
    fn clone(&self) -> Self {
        HeunRay {
            delta: self.delta,
            tol: self.tol,
            radius: self.radius,
            near: self.near.clone(),
            start: self.start,
            cache: Mutex::new(self.cache.lock().map(|c| c.clone()).unwrap_or(None)),
        }
    }
}

fn direction() -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)
}

/// Taylor expansion of a HeunB solution about a point `x0`, valid on a disk.
///
/// Coefficients `c_n = H⁽ⁿ⁾(x0)/n!` follow from the differentiated equation
/// `x(n+2)(n+1) c_{n+2} = −(n+1)(n+1−2x²) c_{n+1} + (4nx+2x+δ/2) c_n + 2n c_{n−1}`.
#[derive(Debug, Clone)]
pub struct LocalExpansion {
    center: Complex64,
    coeffs: Vec<Complex64>,
}

impl LocalExpansion {
    const MAX_TERMS: usize = 400;

    fn new(hd: Complex64, x: Complex64, h: Complex64, dh: Complex64, radius: f64) -> Result<Self, SpecFunError> {
        let mut c = vec![h, dh];
        let mut peak = h.norm().max(dh.norm() * radius);
        let mut quiet = 0;
        let mut pw = radius;
        while quiet < 3 {
            let n = c.len() - 2;
            if c.len() >= Self::MAX_TERMS {
                return Err(SpecFunError::NoConvergence { terms: c.len(), estimate: c[c.len() - 1].norm() * pw / peak });
            }
            let nf = n as f64;
            let prev = if n == 0 { Complex64::new(0.0, 0.0) } else { c[n - 1] };
            let next = (-(nf + 1.0) * (nf + 1.0 - 2.0 * x * x) * c[n + 1] + (4.0 * nf * x + 2.0 * x + hd) * c[n] + 2.0 * nf * prev)
                / (x * (nf + 2.0) * (nf + 1.0));
            c.push(next);
            pw *= radius;
            let term = next.norm() * pw;
            peak = peak.max(term);
            quiet = if term <= 1e-17 * peak { quiet + 1 } else { 0 };
        }
        Ok(LocalExpansion { center: x, coeffs: c })
    }

    /// The series about the origin, `a₀ = 1`, `a₁ = δ/2`,
    /// `(m+1)² a_{m+1} = (δ/2) a_m + 2m a_{m−1}`.
    fn maclaurin(delta: Complex64, radius: f64) -> Result<Self, SpecFunError> {
        let hd = 0.5 * delta;
        let mut c = vec![Complex64::new(1.0, 0.0), hd];
        let mut peak = 1.0f64.max(hd.norm() * radius);
        let mut pw = radius;
        let mut quiet = 0;
        while quiet < 3 {
            let m = c.len() - 1;
            if c.len() >= Self::MAX_TERMS {
                return Err(SpecFunError::NoConvergence { terms: c.len(), estimate: c[m].norm() * pw / peak });
            }
            let mf = m as f64;
            let next = (hd * c[m] + 2.0 * mf * c[m - 1]) / ((mf + 1.0) * (mf + 1.0));
            c.push(next);
            pw *= radius;
            let term = next.norm() * pw;
            peak = peak.max(term);
            quiet = if term <= 1e-17 * peak { quiet + 1 } else { 0 };
        }
        Ok(LocalExpansion { center: Complex64::new(0.0, 0.0), coeffs: c })
    }

    /// `(H, H')` at `x`.
    pub fn eval(&self, x: Complex64) -> (Complex64, Complex64) {
        let dx = x - self.center;
        let zero = Complex64::new(0.0, 0.0);
        let (mut v, mut dv) = (zero, zero);
        for (n, &c) in self.coeffs.iter().enumerate().rev() {
            v = v * dx + c;
            if n > 0 {
                dv = dv * dx + c * n as f64;
            }
        }
        (v, dv)
    }
}

impl HeunRay {
    pub fn new(delta: Complex64, tol: f64) -> Result<Self, SpecFunError> {
        if !(tol > 0.0) {
            return Err(SpecFunError::BadTolerance);
        }
        if !(delta.re.is_finite() && delta.im.is_finite()) {
            return Err(SpecFunError::NonFiniteArgument);
        }
        let radius = series_radius(delta);
        let near = LocalExpansion::maclaurin(delta, radius)?;
        let (h, dh) = near.eval(direction() * radius);
        Ok(HeunRay { delta, tol, radius, near, start: [h.re, h.im, dh.re, dh.im], cache: Mutex::new(None) })
    }

    pub fn delta(&self) -> Complex64 {
        self.delta
    }

    /// Value and `x`-derivative at `x = r·e^{iπ/4}`.
    pub fn eval(&self, r: f64) -> Result<(Complex64, Complex64), SpecFunError> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(SpecFunError::NonFiniteArgument);
        }
        if r <= self.radius {
            return Ok(self.near.eval(direction() * r));
        }
        let mut guard = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        let reach = guard.as_ref().map_or(self.radius, |d| d.x_max());
        if r > reach {
            let target = r.max(self.radius + 2.0 * (reach - self.radius)).max(self.radius + 4.0);
            let (x0, y0) = match guard.as_ref() {
                Some(d) => (d.x_max(), *d.ys.last().expect("dense solution has nodes")),
                None => (self.radius, self.start),
            };
            let ext = self.integrate(x0, y0, target)?;
            *guard = Some(match guard.take() {
                Some(d) => DenseSolution::merge(d, ext),
                None => ext,
            });
        }
        let s = guard.as_ref().and_then(|d| d.eval(r)).ok_or(SpecFunError::NonFiniteArgument)?;
        Ok((Complex64::new(s[0], s[1]), Complex64::new(s[2], s[3])))
    }

    /// Expansion about the ray point at modulus `r`, accurate for
    /// `|x − r e^{iπ/4}| <= radius`.
    pub fn expansion(&self, r: f64, radius: f64) -> Result<LocalExpansion, SpecFunError> {
        let (h, dh) = self.eval(r)?;
        let x = Complex64::from_polar(r, std::f64::consts::FRAC_PI_4);
        LocalExpansion::new(0.5 * self.delta, x, h, dh, radius)
    }

    /// Value and `x`-derivative at an arbitrary `x`, reached from the ray
    /// along the circle `|x| = const`. Meant for points near the ray.
    pub fn eval_at(&self, x: Complex64) -> Result<(Complex64, Complex64), SpecFunError> {
        let r = x.norm();
        if !r.is_finite() {
            return Err(SpecFunError::NonFiniteArgument);
        }
        if r <= self.radius {
            return Ok(self.near.eval(x));
        }
        let (h, dh) = self.eval(r)?;
        let theta0 = std::f64::consts::FRAC_PI_4;
        let theta = x.arg();
        let hd = 0.5 * self.delta;
        let xr = Complex64::from_polar(r, theta0);
        let dx = x - xr;
        if dx.norm() < 1e-3 {
            return Ok(LocalExpansion::new(hd, xr, h, dh, dx.norm())?.eval(x));
        }
        let rhs = |th: f64, s: &[f64; 4], ds: &mut [f64; 4]| {
            let x = Complex64::from_polar(r, th);
            let y = Complex64::new(s[0], s[1]);
            let dy = Complex64::new(s[2], s[3]);
            let ddy = ((2.0 * x + hd) * y - (1.0 - 2.0 * x * x) * dy) / x;
            let dx = Complex64::new(0.0, 1.0) * x;
            let a = dy * dx;
            let b = ddy * dx;
            ds[0] = a.re;
            ds[1] = a.im;
            ds[2] = b.re;
            ds[3] = b.im;
        };
        let tol = (0.1 * self.tol).max(1e-14);
        let opts = SolverOptions::new(tol, tol * 1e-3);
        let start = [h.re, h.im, dh.re, dh.im];
        let sol = integrate(rhs, theta0, start, theta, &opts).map_err(SpecFunError::Continuation)?;
        let s = sol.eval(theta).ok_or(SpecFunError::NonFiniteArgument)?;
        Ok((Complex64::new(s[0], s[1]), Complex64::new(s[2], s[3])))
    }

    fn integrate(&self, r0: f64, y0: [f64; 4], r1: f64) -> Result<DenseSolution<4>, SpecFunError> {
        let e = direction();
        let hd = 0.5 * self.delta;
        let rhs = |r: f64, s: &[f64; 4], ds: &mut [f64; 4]| {
            let x = e * r;
            let y = Complex64::new(s[0], s[1]);
            let dy = Complex64::new(s[2], s[3]);
            let ddy = ((2.0 * x + hd) * y - (1.0 - 2.0 * x * x) * dy) / x;
            let a = e * dy;
            let b = e * ddy;
            ds[0] = a.re;
            ds[1] = a.im;
            ds[2] = b.re;
            ds[3] = b.im;
        };
        let opts = SolverOptions::new(self.tol.max(1e-13), self.tol.max(1e-13) * 1e-3);
        integrate(rhs, r0, y0, r1, &opts).map_err(SpecFunError::Continuation)
    }
}
