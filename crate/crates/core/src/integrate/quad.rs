//! Adaptive Simpson quadrature for smooth real and complex integrands.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::IntegrateError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub tol: f64,
    pub max_depth: u32,
    /// Uniform panels the interval is split into before adapting. Oscillatory
    /// integrands should get at least a few panels per period.
    pub initial_panels: usize,
}

impl QuadOptions {
    pub fn new(tol: f64) -> Self {
        Self { tol, max_depth: 60, initial_panels: 16 }
    }
}

trait Quadrand: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl Quadrand for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Quadrand for Complex64 {
    fn magnitude(self) -> f64 {
        // componentwise control
        self.re.abs().max(self.im.abs())
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

struct Simpson<'a, T> {
    f: &'a mut dyn FnMut(f64) -> T,
    max_depth: u32,
}

impl<T: Quadrand> Simpson<'_, T> {
    fn eval(&mut self, u: f64) -> Result<T, IntegrateError> {
        let v = (self.f)(u);
        if v.finite() {
            Ok(v)
        } else {
            Err(IntegrateError::IntegrandSingular { at: u })
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(&mut self, a: f64, b: f64, fa: T, fm: T, fb: T, whole: T, eps: f64, depth: u32) -> Result<T, IntegrateError> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
        let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
        let delta = left + right - whole;
        if delta.magnitude() <= 15.0 * eps {
            return Ok(left + right + delta * (1.0 / 15.0));
        }
        if depth >= self.max_depth || m <= a || m >= b {
            return Err(IntegrateError::MaxDepthExceeded { a, b });
        }
        let l = self.recurse(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1)?;
        let r = self.recurse(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1)?;
        Ok(l + r)
    }
}

fn simpson<T: Quadrand>(f: &mut dyn FnMut(f64) -> T, a: f64, b: f64, opts: &QuadOptions, zero: T) -> Result<T, IntegrateError> {
    if !(a < b) {
        return Err(IntegrateError::BadInterval { a, b });
    }
    let n = opts.initial_panels.max(1);
    let mut s = Simpson { f, max_depth: opts.max_depth };
    let h = (b - a) / n as f64;
    let nodes: Vec<f64> = (0..=n).map(|i| if i == n { b } else { a + h * i as f64 }).collect();
    let mut vals = Vec::with_capacity(n + 1);
    for &u in &nodes {
        vals.push(s.eval(u)?);
    }
    // coarse pass fixes the absolute scale of the requested accuracy
    let mut panels = Vec::with_capacity(n);
    let mut coarse = zero;
    let mut coarse_abs = 0.0;
    for i in 0..n {
        let (l, r) = (nodes[i], nodes[i + 1]);
        let fm = s.eval(0.5 * (l + r))?;
        let w = (vals[i] + fm * 4.0 + vals[i + 1]) * ((r - l) / 6.0);
        coarse = coarse + w;
        coarse_abs += w.magnitude();
        panels.push((l, r, vals[i], fm, vals[i + 1], w));
    }
    let scale = 1.0 + coarse.magnitude().max(1e-3 * coarse_abs);
    let eps = opts.tol * scale / n as f64;
    let mut total = zero;
    for (l, r, fl, fm, fr, w) in panels {
        total = total + s.recurse(l, r, fl, fm, fr, w, eps, 1)?;
    }
    Ok(total)
}

/// `∫_a^b f` with `|error| ≲ tol·(1 + |result|)`.
pub fn adaptive_quad<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64, IntegrateError> {
    simpson(&mut f, a, b, &QuadOptions::new(tol), 0.0)
}

pub fn adaptive_quad_with<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<f64, IntegrateError> {
    simpson(&mut f, a, b, opts, 0.0)
}

/// Complex integrand over a real interval; accuracy is controlled on the
/// real and imaginary parts jointly. Non-finite samples are reported as
/// [`IntegrateError::IntegrandSingular`].
pub fn complex_path_quad<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Complex64, IntegrateError> {
    simpson(&mut f, a, b, &QuadOptions::new(tol), Complex64::new(0.0, 0.0))
}

pub fn complex_path_quad_with<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<Complex64, IntegrateError> {
    simpson(&mut f, a, b, opts, Complex64::new(0.0, 0.0))
}
