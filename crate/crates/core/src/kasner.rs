//! Kasner exponents, Fourier momenta and the two scalar profiles every mode
//! computation is built from: the log-time potential `K_ω(s)` and the
//! large-time frequency `f_ω(t)`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerance for the two sum rules.
pub const DEFAULT_TOL: f64 = 1e-12;

const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KasnerError {
    #[error(
        "exponents ({p1}, {p2}, {p3}) violate the Kasner relations: \
         |Σp - 1| = {linear_residual:e}, |Σp² - 1| = {quadratic_residual:e}"
    )]
    ConstraintViolation { p1: f64, p2: f64, p3: f64, linear_residual: f64, quadratic_residual: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
}

/// Geometric class of a validated exponent triple. Indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KasnerClass {
    /// One exponent equals 1, the other two vanish.
    Flat {
        axis: usize,
    },
    /// A permutation of (-1/3, 2/3, 2/3); `distinguished` carries -1/3.
    NonFlatAxisymmetric {
        distinguished: usize,
    },
    NonFlatGeneric,
}

impl KasnerClass {
    pub fn is_flat(&self) -> bool {
        matches!(self, KasnerClass::Flat { .. })
    }
}

impl fmt::Display for KasnerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KasnerClass::Flat { axis } => write!(f, "Flat(axis={})", axis + 1),
            KasnerClass::NonFlatAxisymmetric { distinguished } => {
                write!(f, "NonFlatAxisymmetric(index={})", distinguished + 1)
            }
            KasnerClass::NonFlatGeneric => write!(f, "NonFlatGeneric"),
        }
    }
}

/// A validated exponent triple `(p1, p2, p3)`.
///
/// Inputs are never projected back onto the Kasner circle; a triple that
/// misses either sum rule by more than `tol` is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KasnerExponents {
    p: [f64; 3],
    class: KasnerClass,
    tol: f64,
}

impl KasnerExponents {
    pub fn new(p1: f64, p2: f64, p3: f64, tol: f64) -> Result<Self, KasnerError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(KasnerError::BadTolerance(tol));
        }
        let p = [p1, p2, p3];
        let (linear_residual, quadratic_residual) = sum_rule_residuals(p);
        if !(linear_residual <= tol && quadratic_residual <= tol) {
            return Err(KasnerError::ConstraintViolation { p1, p2, p3, linear_residual, quadratic_residual });
        }
        Ok(Self { p, class: classify(p, tol), tol })
    }

    pub fn from_array(p: [f64; 3]) -> Result<Self, KasnerError> {
        Self::new(p[0], p[1], p[2], DEFAULT_TOL)
    }

    /// The flat triple with exponent 1 on `axis`.
    pub fn flat(axis: usize) -> Self {
        let mut p = [0.0; 3];
        p[axis] = 1.0;
        Self { p, class: KasnerClass::Flat { axis }, tol: DEFAULT_TOL }
    }

    /// The axisymmetric non-flat triple with -1/3 on `distinguished`.
    pub fn axisymmetric(distinguished: usize) -> Self {
        let mut p = [2.0 / 3.0; 3];
        p[distinguished] = -1.0 / 3.0;
        Self { p, class: KasnerClass::NonFlatAxisymmetric { distinguished }, tol: DEFAULT_TOL }
    }

    pub fn p(&self) -> [f64; 3] {
        self.p
    }

    pub fn class(&self) -> KasnerClass {
        self.class
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `(|Σp - 1|, |Σp² - 1|)`.
    pub fn residuals(&self) -> (f64, f64) {
        sum_rule_residuals(self.p)
    }

    /// Growth rates `2 - 2 p_j` of the terms of `K_ω(s)`; all are non-negative.
    pub fn rates(&self) -> [f64; 3] {
        self.p.map(|pj| 2.0 - 2.0 * pj)
    }

    /// Permute the axes: new axis `i` is old axis `perm[i]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Result<Self, KasnerError> {
        Self::new(self.p[perm[0]], self.p[perm[1]], self.p[perm[2]], self.tol)
    }
}

fn sum_rule_residuals(p: [f64; 3]) -> (f64, f64) {
    let s1: f64 = p.iter().sum();
    let s2: f64 = p.iter().map(|x| x * x).sum();
    ((s1 - 1.0).abs(), (s2 - 1.0).abs())
}

fn classify(p: [f64; 3], tol: f64) -> KasnerClass {
    if let Some(axis) = p.iter().position(|&pj| (pj - 1.0).abs() <= tol) {
        return KasnerClass::Flat { axis };
    }
    let third = 1.0 / 3.0;
    for d in 0..3 {
        let matches = (0..3).all(|j| {
            let target = if j == d { -third } else { 2.0 * third };
            (p[j] - target).abs() <= tol
        });
        if matches {
            return KasnerClass::NonFlatAxisymmetric { distinguished: d };
        }
    }
    KasnerClass::NonFlatGeneric
}

/// Fourier momentum `ω = (ω1, ω2, ω3)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Momentum(pub [f64; 3]);

impl Momentum {
    pub const ZERO: Momentum = Momentum([0.0; 3]);

    pub fn new(w1: f64, w2: f64, w3: f64) -> Self {
        Momentum([w1, w2, w3])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0.0)
    }

    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        Momentum([self.0[perm[0]], self.0[perm[1]], self.0[perm[2]]])
    }
}

/// `K_ω(s) = 4π² Σ ω_j² e^{(2 - 2p_j) s}`.
pub fn potential_k(k: &KasnerExponents, w: &Momentum, s: f64) -> f64 {
    let rates = k.rates();
    FOUR_PI_SQ * (0..3).map(|j| w.0[j] * w.0[j] * (rates[j] * s).exp()).sum::<f64>()
}

/// `K_ω` together with its first two derivatives in `s`, all exact.
pub fn potential_k_derivs(k: &KasnerExponents, w: &Momentum, s: f64) -> [f64; 3] {
    let rates = k.rates();
    let mut out = [0.0; 3];
    for (&r, &wj) in rates.iter().zip(&w.0) {
        let term = FOUR_PI_SQ * wj * wj * (r * s).exp();
        out[0] += term;
        out[1] += r * term;
        out[2] += r * r * term;
    }
    out
}

/// `Σ ω_j² t^{-2p_j}`, the square of the large-time frequency.
pub(crate) fn frequency_sq(k: &KasnerExponents, w: &Momentum, t: f64) -> f64 {
    (0..3).map(|j| w.0[j] * w.0[j] * t.powf(-2.0 * k.p[j])).sum()
}

/// Large-time frequency `f_ω(t) = (Σ ω_j² t^{-2p_j})^{1/2}`.
pub fn frequency_f(k: &KasnerExponents, w: &Momentum, t: f64) -> Result<f64, KasnerError> {
    if !(t > 0.0) {
        return Err(KasnerError::NonPositiveTime(t));
    }
    Ok(frequency_sq(k, w, t).sqrt())
}

/// Behaviour of `f_ω(t)` as `t → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FrequencyLimit {
    Constant(f64),
    Infinite,
    Zero,
}

pub fn frequency_limit(k: &KasnerExponents, w: &Momentum) -> FrequencyLimit {
    match k.class {
        KasnerClass::Flat { axis } => {
            let transverse: f64 = (0..3).filter(|&j| j != axis).map(|j| w.0[j] * w.0[j]).sum();
            FrequencyLimit::Constant(transverse.sqrt())
        }
        _ => {
            // at most one exponent of a non-flat triple is negative
            let grows = (0..3).any(|j| k.p[j] < 0.0 && w.0[j] != 0.0);
            if grows {
                FrequencyLimit::Infinite
            } else {
                FrequencyLimit::Zero
            }
        }
    }
}
