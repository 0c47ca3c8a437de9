//! Explicit two-dimensional solution bases of the mode equation for flat and
//! axisymmetric Kasner exponents, and matching to initial data.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::integrate::{complex_path_quad_with, IntegrateError, QuadOptions};
use crate::kasner::{frequency_sq, KasnerClass, KasnerExponents, Momentum};
use crate::modes::{solve_mode_t, ModeError, ModeSpec};
use crate::specfun::{bessel_j, bessel_y, HeunRay, SpecFunError};

/// Closed forms are not evaluated below this time.
pub const T_MIN: f64 = 1e-6;

const BESSEL_TOL: f64 = 1e-15;
const HEUN_TOL: f64 = 1e-12;
const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("exponents of class {found} have no closed form of this kind")]
    WrongClass { found: KasnerClass },
    #[error("closed forms are evaluated only for t >= {T_MIN:e}, got {0:e}")]
    DomainLimit(f64),
    #[error("anchor time must be positive and finite, got {0}")]
    BadAnchor(f64),
    #[error("Wronskian {wronskian:e} is degenerate against the scale {scale:e}")]
    DegenerateWronskian { wronskian: f64, scale: f64 },
    #[error("basis anchored at t0 = {basis} but data given at t0 = {spec}")]
    AnchorMismatch { basis: f64, spec: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    Mode(#[from] ModeError),
}

/// Which explicit family a basis belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisCase {
    /// ω = 0 in a flat spacetime: `{1, t0 ln(t/t0)}`.
    FlatZero,
    /// Momentum only along the flat axis: `e^{±2πiω ln t}`.
    FlatAxial,
    /// Transverse momentum in a flat spacetime: `J_ν, Y_ν` with `ν = 2πiω_axis`.
    FlatBessel,
    /// ω = 0 in the axisymmetric spacetime.
    AxisymZero,
    /// Momentum only on the distinguished axis: `J_0, Y_0` at `(3/2)π|ω₁| t^{4/3}`.
    AxisymAxial,
    /// Momentum only transverse to the distinguished axis: `J_0, Y_0` at `6πρ t^{1/3}`.
    AxisymTransverse,
    /// Both kinds of momentum: biconfluent Heun function.
    AxisymHeun,
}

impl BasisCase {
    pub fn description(&self) -> &'static str {
        match self {
            BasisCase::FlatZero | BasisCase::AxisymZero => "{1, t0 ln(t/t0)}",
            BasisCase::FlatAxial => "{exp(2πiω ln t), exp(-2πiω ln t)}",
            BasisCase::FlatBessel => "{J_ν(2πρt), Y_ν(2πρt)}, ν = 2πiω",
            BasisCase::AxisymAxial => "{J_0((3/2)π|ω|t^(4/3)), Y_0(…)}",
            BasisCase::AxisymTransverse => "{J_0(6πρt^(1/3)), Y_0(…)}",
            BasisCase::AxisymHeun => "{exp(-x²/2) HeunB(0,0,0,δ,x), u1 ∫ du/(u u1²)}, x = L t^(2/3)",
        }
    }
}

impl fmt::Display for BasisCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        f.write_str(&s)
    }
}

/// Value and `t`-derivative of one basis function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pair {
    pub value: Complex64,
    pub derivative: Complex64,
}

impl Pair {
    fn new(value: Complex64, derivative: Complex64) -> Self {
        Pair { value, derivative }
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Log,
    Phase {
        nu: f64,
    },
    /// `J_ν(c t^a), Y_ν(c t^a)`.
    Bessel {
        nu: Complex64,
        c: f64,
        a: f64,
    },
    Heun(Arc<HeunState>),
}

/// Two independent solutions `u₁, u₂` of the mode equation for `t > 0`.
#[derive(Debug, Clone)]
pub struct SolutionBasis {
    case: BasisCase,
    exponents: KasnerExponents,
    w: Momentum,
    t0: f64,
    kind: Kind,
}

fn check_anchor(t0: f64) -> Result<(), ClosedFormError> {
    if t0 > 0.0 && t0.is_finite() {
        Ok(())
    } else {
        Err(ClosedFormError::BadAnchor(t0))
    }
}

fn split(w: &Momentum, axis: usize) -> (f64, f64) {
    let rho_sq: f64 = (0..3).filter(|&j| j != axis).map(|j| w.0[j] * w.0[j]).sum();
    (w.0[axis], rho_sq.sqrt())
}

/// Basis for flat exponents with `p_axis = 1`.
pub fn flat_basis(k: &KasnerExponents, w: &Momentum, t0: f64) -> Result<SolutionBasis, ClosedFormError> {
    check_anchor(t0)?;
    let KasnerClass::Flat { axis } = k.class() else {
        return Err(ClosedFormError::WrongClass { found: k.class() });
    };
    let (w1, rho) = split(w, axis);
    let (case, kind) = if w.is_zero() {
        (BasisCase::FlatZero, Kind::Log)
    } else if rho == 0.0 {
        (BasisCase::FlatAxial, Kind::Phase { nu: 2.0 * PI * w1 })
    } else {
        (BasisCase::FlatBessel, Kind::Bessel { nu: Complex64::new(0.0, 2.0 * PI * w1), c: 2.0 * PI * rho, a: 1.0 })
    };
    Ok(SolutionBasis { case, exponents: *k, w: *w, t0, kind })
}

/// Basis for the axisymmetric exponents, a permutation of `(-1/3, 2/3, 2/3)`.
pub fn axisym_basis(k: &KasnerExponents, w: &Momentum, t0: f64) -> Result<SolutionBasis, ClosedFormError> {
    check_anchor(t0)?;
    let KasnerClass::NonFlatAxisymmetric { distinguished } = k.class() else {
        return Err(ClosedFormError::WrongClass { found: k.class() });
    };
    let (w1, rho) = split(w, distinguished);
    let zero = Complex64::new(0.0, 0.0);
    let (case, kind) = if w.is_zero() {
        (BasisCase::AxisymZero, Kind::Log)
    } else if rho == 0.0 {
        (BasisCase::AxisymAxial, Kind::Bessel { nu: zero, c: 1.5 * PI * w1.abs(), a: 4.0 / 3.0 })
    } else if w1 == 0.0 {
        (BasisCase::AxisymTransverse, Kind::Bessel { nu: zero, c: 6.0 * PI * rho, a: 1.0 / 3.0 })
    } else {
        (BasisCase::AxisymHeun, Kind::Heun(Arc::new(HeunState::new(w1.abs(), rho, t0)?)))
    };
    Ok(SolutionBasis { case, exponents: *k, w: *w, t0, kind })
}

/// The basis matching the class of `k`; generic exponents have none.
pub fn basis_for(k: &KasnerExponents, w: &Momentum, t0: f64) -> Result<SolutionBasis, ClosedFormError> {
    match k.class() {
        KasnerClass::Flat { .. } => flat_basis(k, w, t0),
        KasnerClass::NonFlatAxisymmetric { .. } => axisym_basis(k, w, t0),
        found => Err(ClosedFormError::WrongClass { found }),
    }
}

impl SolutionBasis {
    pub fn case(&self) -> BasisCase {
        self.case
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn exponents(&self) -> &KasnerExponents {
        &self.exponents
    }

    pub fn momentum(&self) -> &Momentum {
        &self.w
    }

    /// `(u₁, u₂)` with their derivatives at `t`.
    pub fn eval(&self, t: f64) -> Result<[Pair; 2], ClosedFormError> {
        if !(t >= T_MIN) {
            return Err(ClosedFormError::DomainLimit(t));
        }
        match &self.kind {
            Kind::Log => {
                let one = Complex64::new(1.0, 0.0);
                let zero = Complex64::new(0.0, 0.0);
                Ok([Pair::new(one, zero), Pair::new(Complex64::new(self.t0 * (t / self.t0).ln(), 0.0), Complex64::new(self.t0 / t, 0.0))])
            }
            Kind::Phase { nu } => {
                let ph = Complex64::new(0.0, nu * t.ln());
                let (up, um) = (ph.exp(), (-ph).exp());
                let d = Complex64::new(0.0, nu / t);
                Ok([Pair::new(up, d * up), Pair::new(um, -d * um)])
            }
            Kind::Bessel { nu, c, a } => {
                let x = c * t.powf(*a);
                let dx = c * a * t.powf(a - 1.0);
                let j = bessel_j(*nu, x, BESSEL_TOL)?;
                let y = bessel_y(*nu, x, BESSEL_TOL)?;
                Ok([Pair::new(j.value, j.derivative * dx), Pair::new(y.value, y.derivative * dx)])
            }
            Kind::Heun(h) => h.eval(t),
        }
    }

    /// `u₁u₂' − u₁'u₂` from the evaluated basis.
    pub fn wronskian(&self, t: f64) -> Result<Complex64, ClosedFormError> {
        let [a, b] = self.eval(t)?;
        Ok(a.value * b.derivative - a.derivative * b.value)
    }

    /// Closed-form value of the Wronskian.
    pub fn wronskian_exact(&self, t: f64) -> Complex64 {
        match &self.kind {
            Kind::Log => Complex64::new(self.t0 / t, 0.0),
            Kind::Phase { nu } => Complex64::new(0.0, -2.0 * nu / t),
            Kind::Bessel { c, a, .. } => {
                let x = c * t.powf(*a);
                let dx = c * a * t.powf(a - 1.0);
                Complex64::new(2.0 / (PI * x) * dx, 0.0)
            }
            Kind::Heun(_) => Complex64::new(1.0 / t, 0.0),
        }
    }
}

/// A simple zero `z` of `u₁` crossed by a half circle of radius `rho` in
/// the upper half `t`-plane; `after` is `I` on the far side of the detour.
///
/// Near `z`, `I(t) = −A/(t − z) + G(t)` and `u₁ = (t − z) q(t)` with `G`, `q`
/// analytic; their values on the circle `|t − z| = rho` give both, and hence
/// the basis, inside it without cancellation.
#[derive(Debug, Clone)]
struct Detour {
    z: f64,
    rho: f64,
    a: f64,
    after: Complex64,
    g: Vec<Complex64>,
    q: Vec<Complex64>,
}

/// `I(t)`, or the whole basis when `t` is close to a zero of `u₁`.
enum Lookup {
    Integral(Complex64),
    Basis([Pair; 2]),
}

/// Nodes on each detour circle.
const RING: usize = 64;

impl Detour {
    /// Trapezoidal Cauchy formula for `f` and `f'` at `z + d` from node values.
    fn cauchy(&self, vals: &[Complex64], d: f64) -> (Complex64, Complex64) {
        let mut f = Complex64::new(0.0, 0.0);
        let mut df = Complex64::new(0.0, 0.0);
        for (k, &v) in vals.iter().enumerate() {
            let e = Complex64::from_polar(self.rho, 2.0 * PI * k as f64 / RING as f64);
            let w = v * e / (e - d);
            f += w;
            df += w / (e - d);
        }
        (f / RING as f64, df / RING as f64)
    }

    /// `(u₁, u₂)` for `|t − z| <= rho/2`.
    fn inner(&self, t: f64) -> [Pair; 2] {
        let d = t - self.z;
        let (g, dg) = self.cauchy(&self.g, d);
        let (q, dq) = self.cauchy(&self.q, d);
        let u1 = Pair::new(q * d, q + dq * d);
        let u2 = Pair::new(q * d * g - self.a * q, u1.derivative * g + q * d * dg - self.a * dq);
        [u1, u2]
    }
}

/// Knots of `I` on one side of `t0`, placed midway between consecutive
/// zeros of `u₁` or at zero-free query points; gap `j` between knots `j`
/// and `j + 1` holds at most one detour.
#[derive(Debug)]
struct Table {
    knots: Vec<(f64, Complex64)>,
    detours: Vec<Option<Detour>>,
}

/// The Heun-case basis with lazily built cumulative tables for `u₂`.
///
/// `u₁` is real on the real axis and has simple zeros there, where
/// `1/(u u₁²)` has double poles of zero residue. The integral is taken
/// around them through the upper half plane, which continues `u₂` smoothly.
#[derive(Debug)]
struct HeunState {
    ray: HeunRay,
    /// `|x| = r_scale · t^{2/3}` along the ray `arg x = π/4`.
    r_scale: f64,
    w1: f64,
    rho: f64,
    t0: f64,
    above: Mutex<Table>,
    below: Mutex<Table>,
}

impl HeunState {
    fn new(w1: f64, rho: f64, t0: f64) -> Result<Self, ClosedFormError> {
        let l = (1.5 * PI * w1).sqrt() * Complex64::new(1.0, 1.0);
        let delta = -18.0 * PI * PI * rho * rho / l;
        let table = || Mutex::new(Table { knots: vec![(t0, Complex64::new(0.0, 0.0))], detours: Vec::new() });
        Ok(HeunState { ray: HeunRay::new(delta, HEUN_TOL)?, r_scale: (3.0 * PI * w1).sqrt(), w1, rho, t0, above: table(), below: table() })
    }

    /// `u₁ = e^{-x²/2} H(x)` and `u₁'` with `x = L t^{2/3}`.
    fn u1(&self, t: f64) -> Result<Pair, ClosedFormError> {
        let r = self.r_scale * t.powf(2.0 / 3.0);
        let (h, dh) = self.ray.eval(r)?;
        let x = Complex64::from_polar(r, PI / 4.0);
        let damp = Complex64::new(0.0, -0.5 * r * r).exp();
        let dx_dt = x * (2.0 / (3.0 * t));
        Ok(Pair::new(damp * h, damp * (dh - x * h) * dx_dt))
    }

    fn integrand(&self, u: f64) -> Complex64 {
        match self.u1(u) {
            Ok(p) => 1.0 / (u * p.value * p.value),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    fn segment(&self, a: f64, b: f64) -> Result<Complex64, ClosedFormError> {
        if a == b {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let opts = QuadOptions { tol: QUAD_TOL, max_depth: 60, initial_panels: 8 };
        Ok(sign * complex_path_quad_with(|u| self.integrand(u), lo, hi, &opts)?)
    }

    /// Integrals `J_k` from `z − rho` to the ring nodes `z + rho e^{2πik/N}`,
    /// through the upper half circle for `k <= N/2` and the lower one beyond,
    /// and `u₁` at the nodes. `H` comes from one expansion about the image
    /// of `z`.
    #[allow(clippy::type_complexity)]
    fn ring(&self, z: f64, rho: f64) -> Result<(Vec<Complex64>, Vec<Complex64>), ClosedFormError> {
        let radius = 1.05 * self.r_scale * (z.powf(2.0 / 3.0) - (z - rho).powf(2.0 / 3.0));
        let local = self.ray.expansion(self.r_scale * z.powf(2.0 / 3.0), radius)?;
        let dir = Complex64::from_polar(self.r_scale, PI / 4.0);
        let u1 = |e: Complex64| {
            let x = dir * (z + e).powf(2.0 / 3.0);
            (-0.5 * x * x).exp() * local.eval(x).0
        };
        let g = |phi: f64| {
            let e = Complex64::from_polar(rho, phi);
            let u = u1(e);
            Complex64::new(0.0, 1.0) * e / ((z + e) * u * u)
        };
        let opts = QuadOptions { tol: QUAD_TOL, max_depth: 60, initial_panels: 2 };
        let phi = |k: usize| 2.0 * PI * k as f64 / RING as f64;
        let half = RING / 2;
        let mut j = vec![Complex64::new(0.0, 0.0); RING + 1];
        for k in (0..half).rev() {
            j[k] = j[k + 1] - complex_path_quad_with(g, phi(k), phi(k + 1), &opts)?;
        }
        for k in half + 1..=RING {
            j[k] = j[k - 1] + complex_path_quad_with(g, phi(k - 1), phi(k), &opts)?;
        }
        let u = (0..RING).map(|k| u1(Complex64::from_polar(rho, phi(k)))).collect();
        Ok((j, u))
    }

    /// Scan step: an eighth of the local half period, at most `t/20`.
    fn scan_step(&self, t: f64) -> f64 {
        let f = (self.w1 * self.w1 * t.powf(2.0 / 3.0) + self.rho * self.rho * t.powf(-4.0 / 3.0)).sqrt();
        (1.0 / (16.0 * f)).min(0.05 * t)
    }

    /// First zero of `u₁` strictly between `from` and `limit`.
    fn next_zero(&self, from: f64, limit: f64) -> Result<Option<f64>, ClosedFormError> {
        let up = limit > from;
        let mut a = from;
        let mut ua = self.u1(a)?.value.re;
        loop {
            if (up && a >= limit) || (!up && a <= limit) {
                return Ok(None);
            }
            let h = self.scan_step(a);
            let b = if up { (a + h).min(limit) } else { (a - h).max(limit) };
            let ub = self.u1(b)?.value.re;
            if ua != 0.0 && ub != 0.0 && (ua < 0.0) != (ub < 0.0) {
                return self.bisect(a, ua, b).map(Some);
            }
            if ub == 0.0 && b != limit {
                return Ok(Some(b));
            }
            a = b;
            ua = ub;
        }
    }

    fn bisect(&self, mut a: f64, mut ua: f64, mut b: f64) -> Result<f64, ClosedFormError> {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (b - a).abs() <= 4.0 * f64::EPSILON * m || m == a || m == b {
                break;
            }
            let um = self.u1(m)?.value.re;
            if um == 0.0 {
                return Ok(m);
            }
            if (um < 0.0) == (ua < 0.0) {
                a = m;
                ua = um;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    }

    /// Extend `table` by one detour and knot beyond zero `z`.
    fn extend(&self, table: &mut Table, z: f64, up: bool) -> Result<(), ClosedFormError> {
        let &(m, im) = table.knots.last().expect("table starts with the anchor");
        let near = (z - m).abs();
        let far_limit = if up { 2.0 * z } else { 0.5 * T_MIN };
        let skip = 0.25 * self.scan_step(z);
        let far = match self.next_zero(if up { z + skip } else { z - skip }, far_limit)? {
            Some(z2) => 0.5 * (z2 - z).abs(),
            None => near.max(self.scan_step(z)).min(0.5 * z),
        };
        let rho = 0.5 * near.min(far);
        let (before, beyond) = if up { (z - rho, z + rho) } else { (z + rho, z - rho) };
        let (j, u) = self.ring(z, rho)?;
        let at_before = im + self.segment(m, before)?;
        let i_minus = if up { at_before } else { at_before - j[0] };
        let after = if up { i_minus + j[0] } else { i_minus };
        let slope = self.u1(z)?.derivative;
        let a = (1.0 / (z * slope * slope)).re;
        let node = |k: usize| Complex64::from_polar(rho, 2.0 * PI * k as f64 / RING as f64);
        let g = (0..RING).map(|k| i_minus + j[k] + a / node(k)).collect();
        let q = (0..RING).map(|k| u[k] / node(k)).collect();
        let next = if up { z + far } else { z - far };
        let inext = after + self.segment(beyond, next)?;
        table.detours.push(Some(Detour { z, rho, a, after, g, q }));
        table.knots.push((next, inext));
        Ok(())
    }

    fn integral(&self, t: f64) -> Result<Lookup, ClosedFormError> {
        let up = t >= self.t0;
        let table = if up { &self.above } else { &self.below };
        let mut table = table.lock().unwrap_or_else(|e| e.into_inner());
        loop {
            let &(m, _) = table.knots.last().expect("table starts with the anchor");
            let beyond = if up { t > m } else { t < m };
            if !beyond {
                break;
            }
            let margin = 4.0 * self.scan_step(t);
            let limit = if up { t + margin } else { (t - margin).max(0.5 * T_MIN) };
            match self.next_zero(m, limit)? {
                Some(z) => self.extend(&mut table, z, up)?,
                None => {
                    let im = table.knots.last().expect("table starts with the anchor").1;
                    let it = im + self.segment(m, t)?;
                    table.knots.push((t, it));
                    table.detours.push(None);
                }
            }
        }
        let idx = if up { table.knots.partition_point(|&(tk, _)| tk <= t) } else { table.knots.partition_point(|&(tk, _)| tk >= t) }
            .saturating_sub(1);
        let (m, im) = table.knots[idx];
        match table.detours.get(idx).and_then(Option::as_ref) {
            Some(d) if (t - d.z).abs() <= 0.5 * d.rho => Ok(Lookup::Basis(d.inner(t))),
            Some(d) if (up && t >= d.z) || (!up && t <= d.z) => {
                let from = if up { d.z + d.rho } else { d.z - d.rho };
                Ok(Lookup::Integral(d.after + self.segment(from, t)?))
            }
            _ => Ok(Lookup::Integral(im + self.segment(m, t)?)),
        }
    }

    fn eval(&self, t: f64) -> Result<[Pair; 2], ClosedFormError> {
        let i = match self.integral(t)? {
            Lookup::Integral(i) => i,
            Lookup::Basis(basis) => return Ok(basis),
        };
        let u1 = self.u1(t)?;
        let u2 = Pair::new(u1.value * i, u1.derivative * i + 1.0 / (t * u1.value));
        Ok([u1, u2])
    }
}

/// A basis with constants fixed by initial data: `α = c₁u₁ + c₂u₂`.
#[derive(Debug, Clone)]
pub struct MatchedSolution {
    pub basis: SolutionBasis,
    pub c1: Complex64,
    pub c2: Complex64,
}

/// Solve `c₁u₁(t0) + c₂u₂(t0) = α0`, `c₁u₁'(t0) + c₂u₂'(t0) = α'0`.
pub fn match_constants(basis: &SolutionBasis, spec: &ModeSpec) -> Result<MatchedSolution, ClosedFormError> {
    let t0 = spec.t0;
    let [a, b] = basis.eval(t0)?;
    let det = a.value * b.derivative - a.derivative * b.value;
    let scale = a.value.norm() * b.derivative.norm() + a.derivative.norm() * b.value.norm();
    if !(det.norm() >= 1e-12 * scale) || scale == 0.0 {
        return Err(ClosedFormError::DegenerateWronskian { wronskian: det.norm(), scale });
    }
    let c1 = (spec.alpha0 * b.derivative - spec.alphadot0 * b.value) / det;
    let c2 = (a.value * spec.alphadot0 - a.derivative * spec.alpha0) / det;
    Ok(MatchedSolution { basis: basis.clone(), c1, c2 })
}

/// `c₁u₁ + c₂u₂` and its derivative at `t`.
pub fn eval_matched(m: &MatchedSolution, t: f64) -> Result<(Complex64, Complex64), ClosedFormError> {
    let [a, b] = m.basis.eval(t)?;
    Ok((m.c1 * a.value + m.c2 * b.value, m.c1 * a.derivative + m.c2 * b.derivative))
}

/// Closed form against the numerical solver on `[t0, t_end]`.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub case: BasisCase,
    pub c1: Complex64,
    pub c2: Complex64,
    pub samples: usize,
    /// Largest `|α_closed − α_numeric|` relative to the local amplitude.
    pub max_rel_deviation: f64,
    pub worst_t: f64,
}

/// Local amplitude `(|α|² + |α'|² / Ω²)^{1/2}` with `Ω² = 4π² f_ω(t)² + 1/t²`.
pub fn local_amplitude(k: &KasnerExponents, w: &Momentum, t: f64, value: Complex64, derivative: Complex64) -> f64 {
    let omega_sq = 4.0 * PI * PI * frequency_sq(k, w, t) + 1.0 / (t * t);
    (value.norm_sqr() + derivative.norm_sqr() / omega_sq).sqrt()
}

/// Match `spec` in the basis of `k`, solve numerically to `t_end` and report
/// the largest relative deviation over the trajectory samples.
pub fn compare_numeric(k: &KasnerExponents, spec: &ModeSpec, t_end: f64, tol: f64) -> Result<Comparison, ClosedFormError> {
    let basis = basis_for(k, &spec.w, spec.t0)?;
    let matched = match_constants(&basis, spec)?;
    let traj = solve_mode_t(k, spec, t_end, tol)?;
    let mut worst = (0.0, spec.t0);
    let samples = traj.samples();
    for s in &samples {
        let (v, _) = eval_matched(&matched, s.x)?;
        let amp = local_amplitude(k, &spec.w, s.x, s.value, s.derivative);
        let dev = (v - s.value).norm() / amp.max(f64::MIN_POSITIVE);
        if dev > worst.0 {
            worst = (dev, s.x);
        }
    }
    Ok(Comparison {
        case: basis.case(),
        c1: matched.c1,
        c2: matched.c2,
        samples: samples.len(),
        max_rel_deviation: worst.0,
        worst_t: worst.1,
    })
}

/// `α'' + α'/t + 4π² f_ω(t)² α` from a value, its derivative and a
/// central difference of the derivative.
pub fn ode_residual(k: &KasnerExponents, w: &Momentum, t: f64, eval: impl Fn(f64) -> Pair) -> f64 {
    let omega = (4.0 * PI * PI * frequency_sq(k, w, t) + 1.0 / (t * t)).sqrt();
    let h = (1e-5 * t).min(3e-4 / omega);
    let p = eval(t);
    let ddu = (eval(t + h).derivative - eval(t - h).derivative) / (2.0 * h);
    let stiff = 4.0 * PI * PI * frequency_sq(k, w, t);
    let res = ddu + p.derivative / t + stiff * p.value;
    let scale = ddu.norm() + p.derivative.norm() / t + stiff * p.value.norm();
    res.norm() / scale.max(f64::MIN_POSITIVE)
}
