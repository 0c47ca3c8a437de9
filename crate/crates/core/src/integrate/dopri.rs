//! Dormand–Prince 5(4) with PI step-size control and the classical
//! fourth-order continuous extension.

use super::IntegrateError;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-control settings for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: Option<f64>,
    pub max_steps: usize,
    /// Disable adaptivity and take steps of exactly this size (last step clipped).
    pub fixed_step: Option<f64>,
}

impl SolverOptions {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, h_init: None, h_max: None, max_steps: 2_000_000, fixed_step: None }
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self::new(1e-10, 1e-12)
    }
}

/// One accepted step and its interpolation coefficients.
#[derive(Debug, Clone)]
pub struct Segment<const N: usize> {
    pub x0: f64,
    pub h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    pub fn x1(&self) -> f64 {
        self.x0 + self.h
    }

    pub fn eval(&self, x: f64) -> [f64; N] {
        let theta = (x - self.x0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        std::array::from_fn(|i| r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i]))))
    }

    fn hi(&self) -> f64 {
        self.x0.max(self.x0 + self.h)
    }
}

/// Output of a single directional run: accepted nodes plus dense segments,
/// ordered by increasing independent variable.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    pub xs: Vec<f64>,
    pub ys: Vec<[f64; N]>,
    segments: Vec<Segment<N>>,
    pub accepted: usize,
    pub rejected: usize,
}

impl<const N: usize> DenseSolution<N> {
    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn segments(&self) -> &[Segment<N>] {
        &self.segments
    }

    /// Dense evaluation; `None` outside the integrated range.
    pub fn eval(&self, x: f64) -> Option<[f64; N]> {
        if self.segments.is_empty() {
            return (x == self.xs[0]).then(|| self.ys[0]);
        }
        let lo = self.x_min();
        let hi = self.x_max();
        let slack = 1e-12 * (hi - lo).abs().max(lo.abs().max(hi.abs()) * 1e-4);
        if x < lo - slack || x > hi + slack {
            return None;
        }
        let idx = self.segments.partition_point(|s| s.hi() < x);
        let seg = &self.segments[idx.min(self.segments.len() - 1)];
        Some(seg.eval(x))
    }

    /// Join a backward run (from the shared initial point towards smaller x)
    /// with a forward run.
    pub fn merge(backward: DenseSolution<N>, forward: DenseSolution<N>) -> DenseSolution<N> {
        // both runs start at the same node; keep one copy
        let mut xs = backward.xs;
        let mut ys = backward.ys;
        xs.extend_from_slice(&forward.xs[1..]);
        ys.extend_from_slice(&forward.ys[1..]);
        let mut segments = backward.segments;
        segments.extend(forward.segments);
        DenseSolution { xs, ys, segments, accepted: backward.accepted + forward.accepted, rejected: backward.rejected + forward.rejected }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        y[i] + h * acc
    })
}

fn err_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], o: &SolverOptions) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = o.atol + o.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

fn initial_step<const N: usize, F>(f: &mut F, x0: f64, y0: &[f64; N], k1: &[f64; N], dir: f64, o: &SolverOptions) -> f64
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]),
{
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = o.atol + o.rtol * y0[i].abs();
        dnf += (k1[i] / sk).powi(2);
        dny += (y0[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { (dny / dnf).sqrt() * 0.01 };
    if let Some(hm) = o.h_max {
        h = h.min(hm);
    }
    let y1 = axpy(y0, h * dir, &[(1.0, k1)]);
    let mut k2 = [0.0; N];
    f(x0 + h * dir, &y1, &mut k2);
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = o.atol + o.rtol * y0[i].abs();
        der2 += ((k2[i] - k1[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(0.2) };
    let mut h = (100.0 * h).min(h1);
    if let Some(hm) = o.h_max {
        h = h.min(hm);
    }
    h
}

/// Integrate `y' = f(x, y)` from `x0` to `x_end` (either direction).
pub fn integrate<const N: usize, F>(
    mut f: F,
    x0: f64,
    y0: [f64; N],
    x_end: f64,
    opts: &SolverOptions,
) -> Result<DenseSolution<N>, IntegrateError>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]),
{
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(IntegrateError::BadTolerance);
    }
    if !x0.is_finite() || !x_end.is_finite() {
        return Err(IntegrateError::NonFiniteSpan);
    }
    let mut sol = DenseSolution { xs: vec![x0], ys: vec![y0], segments: Vec::new(), accepted: 0, rejected: 0 };
    if x_end == x0 {
        return Ok(sol);
    }
    let dir = (x_end - x0).signum();
    let span = (x_end - x0).abs();

    let mut x = x0;
    let mut y = y0;
    let mut k1 = [0.0; N];
    f(x, &y, &mut k1);

    let mut h = match (opts.fixed_step, opts.h_init) {
        (Some(hf), _) => hf.abs(),
        (None, Some(hi)) => hi.abs(),
        (None, None) => initial_step(&mut f, x, &y, &k1, dir, opts),
    };
    let h_max = opts.h_max.unwrap_or(span);

    // PI controller constants (Hairer & Wanner)
    let beta = 0.04;
    let expo1 = 0.2 - beta * 0.75;
    let safe = 0.9;
    let fac_min = 0.2;
    let fac_max = 10.0;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;

    let mut k2 = [0.0; N];
    let mut k3 = [0.0; N];
    let mut k4 = [0.0; N];
    let mut k5 = [0.0; N];
    let mut k6 = [0.0; N];
    let mut k7 = [0.0; N];

    let mut steps = 0usize;
    loop {
        let remaining = (x_end - x) * dir;
        if remaining <= 0.0 {
            break;
        }
        if steps >= opts.max_steps {
            return Err(IntegrateError::MaxStepsExceeded { at: x, steps });
        }
        steps += 1;
        h = h.min(h_max);
        let last = h >= remaining * (1.0 - 1e-12) || remaining - h < 1e-12 * span;
        if last {
            h = remaining;
        }
        let floor = 16.0 * f64::EPSILON * x.abs().max(span * 1e-3);
        if h < floor {
            return Err(IntegrateError::StepUnderflow { at: x, step: h });
        }
        let hs = h * dir;

        let y2 = axpy(&y, hs, &[(A21, &k1)]);
        f(x + C2 * hs, &y2, &mut k2);
        let y3 = axpy(&y, hs, &[(A31, &k1), (A32, &k2)]);
        f(x + C3 * hs, &y3, &mut k3);
        let y4 = axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        f(x + C4 * hs, &y4, &mut k4);
        let y5 = axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        f(x + C5 * hs, &y5, &mut k5);
        let y6 = axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let x_new = if last { x_end } else { x + hs };
        f(x + hs, &y6, &mut k6);
        let y_new = axpy(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        f(x_new, &y_new, &mut k7);

        let err: [f64; N] = std::array::from_fn(|i| hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]));
        let en = err_norm(&err, &y, &y_new, opts);
        if !en.is_finite() {
            if opts.fixed_step.is_some() {
                return Err(IntegrateError::NonFiniteState { at: x });
            }
            h *= 0.1;
            sol.rejected += 1;
            last_rejected = true;
            continue;
        }

        if opts.fixed_step.is_none() && en > 1.0 {
            let fac11 = en.powf(expo1);
            h /= (fac11 / safe).min(1.0 / fac_min);
            sol.rejected += 1;
            last_rejected = true;
            continue;
        }

        // accepted
        let mut rcont = [[0.0; N]; 5];
        for i in 0..N {
            let ydiff = y_new[i] - y[i];
            let bspl = hs * k1[i] - ydiff;
            rcont[0][i] = y[i];
            rcont[1][i] = ydiff;
            rcont[2][i] = bspl;
            rcont[3][i] = ydiff - hs * k7[i] - bspl;
            rcont[4][i] = hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        sol.segments.push(Segment { x0: x, h: hs, rcont });
        sol.accepted += 1;
        x = x_new;
        y = y_new;
        k1 = k7;
        sol.xs.push(x);
        sol.ys.push(y);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(IntegrateError::NonFiniteState { at: x });
        }

        if let Some(hf) = opts.fixed_step {
            h = hf.abs();
            continue;
        }
        let fac11 = en.max(1e-300).powf(expo1);
        let mut fac = fac11 / facold.powf(beta);
        fac = (fac / safe).clamp(1.0 / fac_max, 1.0 / fac_min);
        let mut h_new = h / fac;
        if last_rejected {
            h_new = h_new.min(h);
        }
        facold = en.max(1e-4);
        last_rejected = false;
        h = h_new;
    }

    if dir < 0.0 {
        sol.xs.reverse();
        sol.ys.reverse();
        sol.segments.reverse();
    }
    Ok(sol)
}
