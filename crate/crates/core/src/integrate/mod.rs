//! Adaptive numerics: an embedded Runge–Kutta solver for complex linear
//! second-order ODEs and adaptive Simpson quadrature.

mod dopri;
mod quad;

pub use dopri::{integrate, DenseSolution, Segment, SolverOptions};
pub use quad::{adaptive_quad, adaptive_quad_with, complex_path_quad, complex_path_quad_with, QuadOptions};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrateError {
    #[error("step size underflow at x = {at} (h = {step:e}); the problem is stiff or singular here")]
    StepUnderflow { at: f64, step: f64 },
    #[error("maximum number of steps ({steps}) exceeded at x = {at}")]
    MaxStepsExceeded { at: f64, steps: usize },
    #[error("solution became non-finite at x = {at}")]
    NonFiniteState { at: f64 },
    #[error("tolerances must be positive")]
    BadTolerance,
    #[error("integration span must be finite")]
    NonFiniteSpan,
    #[error("quadrature recursion depth exceeded on [{a}, {b}]")]
    MaxDepthExceeded { a: f64, b: f64 },
    #[error("integrand is not finite at u = {at}")]
    IntegrandSingular { at: f64 },
    #[error("quadrature needs a < b, got [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
}

/// Coefficients of `y'' + damping·y' + stiffness·y = forcing` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub damping: Complex64,
    pub stiffness: Complex64,
    pub forcing: Complex64,
}

impl Coefficients {
    pub fn homogeneous(damping: Complex64, stiffness: Complex64) -> Self {
        Self { damping, stiffness, forcing: Complex64::new(0.0, 0.0) }
    }
}

/// Initial-value problem for a complex linear second-order ODE.
///
/// The solution is started at `t0` and continued to both ends of
/// `[t_start, t_end]`.
#[derive(Debug, Clone)]
pub struct IvpProblem<F> {
    pub coefficients: F,
    pub t0: f64,
    pub y0: Complex64,
    pub dy0: Complex64,
    pub t_start: f64,
    pub t_end: f64,
    pub options: SolverOptions,
}

impl<F> IvpProblem<F>
where
    F: Fn(f64) -> Coefficients,
{
    /// Problem on the span between `t0` and `t_end`.
    pub fn new(coefficients: F, t0: f64, y0: Complex64, dy0: Complex64, t_end: f64, rtol: f64, atol: f64) -> Self {
        Self { coefficients, t0, y0, dy0, t_start: t0.min(t_end), t_end: t0.max(t_end), options: SolverOptions::new(rtol, atol) }
    }
}

/// Complex solution `(y, y')` with dense evaluation.
#[derive(Debug, Clone)]
pub struct SampledSolution {
    dense: DenseSolution<4>,
}

fn pack(y: Complex64, dy: Complex64) -> [f64; 4] {
    [y.re, y.im, dy.re, dy.im]
}

fn unpack(s: &[f64; 4]) -> (Complex64, Complex64) {
    (Complex64::new(s[0], s[1]), Complex64::new(s[2], s[3]))
}

impl SampledSolution {
    pub fn from_dense(dense: DenseSolution<4>) -> Self {
        Self { dense }
    }

    /// Sample points (accepted step nodes), strictly increasing.
    pub fn points(&self) -> &[f64] {
        &self.dense.xs
    }

    pub fn len(&self) -> usize {
        self.dense.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dense.xs.is_empty()
    }

    /// Value and derivative at the `i`-th node.
    pub fn node(&self, i: usize) -> (f64, Complex64, Complex64) {
        let (y, dy) = unpack(&self.dense.ys[i]);
        (self.dense.xs[i], y, dy)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, Complex64, Complex64)> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    pub fn range(&self) -> (f64, f64) {
        (self.dense.x_min(), self.dense.x_max())
    }

    /// Dense evaluation of `(y, y')`; `None` outside the solved range.
    pub fn eval(&self, t: f64) -> Option<(Complex64, Complex64)> {
        self.dense.eval(t).map(|s| unpack(&s))
    }

    pub fn accepted_steps(&self) -> usize {
        self.dense.accepted
    }

    pub fn rejected_steps(&self) -> usize {
        self.dense.rejected
    }
}

/// Solve `y'' + a y' + b y = c` from `t0` across `[t_start, t_end]`.
///
/// The complex equation is integrated as a real system of dimension four;
/// tolerances apply to the combined norm.
pub fn solve_ivp<F>(problem: &IvpProblem<F>) -> Result<SampledSolution, IntegrateError>
where
    F: Fn(f64) -> Coefficients,
{
    let rhs = |t: f64, s: &[f64; 4], ds: &mut [f64; 4]| {
        let (y, dy) = unpack(s);
        let c = (problem.coefficients)(t);
        let ddy = c.forcing - c.damping * dy - c.stiffness * y;
        ds[0] = dy.re;
        ds[1] = dy.im;
        ds[2] = ddy.re;
        ds[3] = ddy.im;
    };
    if !(problem.t_start <= problem.t0 && problem.t0 <= problem.t_end) {
        return Err(IntegrateError::BadInterval { a: problem.t_start, b: problem.t_end });
    }
    let init = pack(problem.y0, problem.dy0);
    let backward = integrate(rhs, problem.t0, init, problem.t_start, &problem.options)?;
    let forward = integrate(rhs, problem.t0, init, problem.t_end, &problem.options)?;
    Ok(SampledSolution { dense: DenseSolution::merge(backward, forward) })
}
