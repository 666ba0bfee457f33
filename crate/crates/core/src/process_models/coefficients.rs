//! ARCH(∞) coefficient sequences {a_j}_{j≥1} with analytic tail sums.

use crate::error::{Error, Result};
use crate::special::hurwitz_zeta;
use serde::{Deserialize, Serialize};

/// Decay class of a coefficient tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", content = "param", rename_all = "lowercase")]
pub enum TailClass {
    /// a_j ∝ r^j with 0 < r < 1.
    Geometric(f64),
    /// a_j ∝ j^{-α} with α > 1.
    Polynomial(f64),
}

/// Coefficient sequence, indexed from j = 1. Index 0 always reads as zero.
///
/// An explicit list with a tail class continues past its last entry a_L as
/// `a_L r^{j-L}` (geometric) or `a_L (L/j)^α` (polynomial); without a tail
/// class it has finite support.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Explicit {
        values: Vec<f64>,
        tail: Option<TailClass>,
    },
    /// a_j = scale · j^{-exponent}
    Power { scale: f64, exponent: f64 },
    /// a_j = scale · ratio^j
    Geometric { scale: f64, ratio: f64 },
}

/// Upper envelope for a_j valid for every j ≥ `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Majorant {
    pub start: usize,
    pub kind: MajorantKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MajorantKind {
    Zero,
    /// a_j ≤ c · j^{-alpha}
    Power { c: f64, alpha: f64 },
    /// a_j ≤ c · r^j
    Geometric { c: f64, r: f64 },
}

impl Majorant {
    pub fn at(&self, j: usize) -> f64 {
        let x = j as f64;
        match self.kind {
            MajorantKind::Zero => 0.0,
            MajorantKind::Power { c, alpha } => c * x.powf(-alpha),
            MajorantKind::Geometric { c, r } => c * r.powf(x),
        }
    }
}

const TRUNCATION_LIMIT: usize = 1 << 27;

impl Coefficients {
    pub fn explicit(values: Vec<f64>) -> Self {
        Coefficients::Explicit { values, tail: None }
    }

    /// Power rule rescaled so that Σ_j a_j equals `sum`.
    pub fn power_with_sum(sum: f64, exponent: f64) -> Self {
        Coefficients::Power {
            scale: sum / hurwitz_zeta(exponent, 1.0),
            exponent,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Coefficients::Explicit { values, tail } => {
                for (i, &v) in values.iter().enumerate() {
                    if !(v.is_finite() && v >= 0.0) {
                        return Err(Error::validation(
                            format!("coeffs[{}]", i + 1),
                            format!("coefficient must be finite and nonnegative, got {v}"),
                        ));
                    }
                }
                match tail {
                    Some(TailClass::Geometric(r)) if !(*r > 0.0 && *r < 1.0) => {
                        Err(Error::validation("tail.param", format!("geometric ratio must lie in (0,1), got {r}")))
                    }
                    Some(TailClass::Polynomial(a)) if !(*a > 1.0 && a.is_finite()) => {
                        Err(Error::validation("tail.param", format!("polynomial exponent must exceed 1, got {a}")))
                    }
                    Some(_) if values.is_empty() => Err(Error::validation(
                        "coeffs",
                        "a tail class needs at least one explicit coefficient to anchor it",
                    )),
                    _ => Ok(()),
                }
            }
            Coefficients::Power { scale, exponent } => {
                if !(scale.is_finite() && *scale >= 0.0) {
                    return Err(Error::validation("coeffs.scale", format!("must be nonnegative, got {scale}")));
                }
                if !(*exponent > 1.0 && exponent.is_finite()) {
                    return Err(Error::validation("coeffs.exponent", format!("must exceed 1, got {exponent}")));
                }
                Ok(())
            }
            Coefficients::Geometric { scale, ratio } => {
                if !(scale.is_finite() && *scale >= 0.0) {
                    return Err(Error::validation("coeffs.scale", format!("must be nonnegative, got {scale}")));
                }
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return Err(Error::validation("coeffs.ratio", format!("must lie in (0,1), got {ratio}")));
                }
                Ok(())
            }
        }
    }

    /// a_j, with a_0 = 0.
    pub fn get(&self, j: usize) -> f64 {
        if j == 0 {
            return 0.0;
        }
        match self {
            Coefficients::Explicit { values, tail } => {
                let l = values.len();
                if j <= l {
                    return values[j - 1];
                }
                let last = match values.last() {
                    Some(&v) => v,
                    None => return 0.0,
                };
                match tail {
                    None => 0.0,
                    Some(TailClass::Geometric(r)) => last * r.powi((j - l) as i32),
                    Some(TailClass::Polynomial(a)) => last * (l as f64 / j as f64).powf(*a),
                }
            }
            Coefficients::Power { scale, exponent } => scale * (j as f64).powf(-exponent),
            Coefficients::Geometric { scale, ratio } => scale * ratio.powi(j as i32),
        }
    }

    /// First `n` coefficients as a vector indexed from 0 (entry 0 is a_0 = 0).
    pub fn prefix(&self, n: usize) -> Vec<f64> {
        (0..=n).map(|j| self.get(j)).collect()
    }

    /// Σ_{j ≥ max(m,1)} a_j, summed analytically.
    pub fn tail_sum(&self, m: usize) -> f64 {
        let m = m.max(1);
        match self {
            Coefficients::Explicit { values, tail } => {
                let l = values.len();
                let head: f64 = if m <= l { values[m - 1..].iter().sum() } else { 0.0 };
                let last = values.last().copied().unwrap_or(0.0);
                let from = m.max(l + 1);
                let rest = match tail {
                    None => 0.0,
                    Some(TailClass::Geometric(r)) => last * r.powi((from - l) as i32) / (1.0 - r),
                    Some(TailClass::Polynomial(a)) => last * (l as f64).powf(*a) * hurwitz_zeta(*a, from as f64),
                };
                head + rest
            }
            Coefficients::Power { scale, exponent } => scale * hurwitz_zeta(*exponent, m as f64),
            Coefficients::Geometric { scale, ratio } => scale * ratio.powi(m as i32) / (1.0 - ratio),
        }
    }

    /// Σ_{j≥1} a_j.
    pub fn total(&self) -> f64 {
        self.tail_sum(1)
    }

    /// Last index with a possibly nonzero coefficient, when finite.
    pub fn support_end(&self) -> Option<usize> {
        match self {
            Coefficients::Explicit { values, tail } => {
                let last_nonzero = values.iter().rposition(|&v| v > 0.0).map(|i| i + 1).unwrap_or(0);
                match tail {
                    Some(_) if values.last().copied().unwrap_or(0.0) > 0.0 => None,
                    _ => Some(last_nonzero),
                }
            }
            Coefficients::Power { scale, .. } | Coefficients::Geometric { scale, .. } => {
                if *scale == 0.0 {
                    Some(0)
                } else {
                    None
                }
            }
        }
    }

    /// Declared decay class of the tail, if any.
    pub fn tail_class(&self) -> Option<TailClass> {
        match self {
            Coefficients::Explicit { tail, .. } => *tail,
            Coefficients::Power { exponent, .. } => Some(TailClass::Polynomial(*exponent)),
            Coefficients::Geometric { ratio, .. } => Some(TailClass::Geometric(*ratio)),
        }
    }

    /// Envelope for the coefficients past the explicit part.
    pub fn majorant(&self) -> Majorant {
        if let Some(end) = self.support_end() {
            return Majorant {
                start: end + 1,
                kind: MajorantKind::Zero,
            };
        }
        match self {
            Coefficients::Explicit { values, tail } => {
                let l = values.len();
                let last = values[l - 1];
                let kind = match tail.expect("infinite support implies a tail") {
                    TailClass::Geometric(r) => MajorantKind::Geometric {
                        c: last * r.powi(-(l as i32)),
                        r,
                    },
                    TailClass::Polynomial(a) => MajorantKind::Power {
                        c: last * (l as f64).powf(a),
                        alpha: a,
                    },
                };
                Majorant { start: l + 1, kind }
            }
            Coefficients::Power { scale, exponent } => Majorant {
                start: 1,
                kind: MajorantKind::Power {
                    c: *scale,
                    alpha: *exponent,
                },
            },
            Coefficients::Geometric { scale, ratio } => Majorant {
                start: 1,
                kind: MajorantKind::Geometric { c: *scale, r: *ratio },
            },
        }
    }

    /// Number of explicitly listed coefficients (0 for closed-form rules).
    pub fn cutoff(&self) -> usize {
        match self {
            Coefficients::Explicit { values, .. } => values.len(),
            _ => 0,
        }
    }

    /// Smallest lag L with Σ_{j>L} a_j < `tol`.
    pub fn truncation_lag(&self, tol: f64) -> Result<usize> {
        if let Some(end) = self.support_end() {
            return Ok(end);
        }
        let below = |l: usize| self.tail_sum(l + 1) < tol;
        let mut hi = self.cutoff().max(1);
        while !below(hi) {
            if hi >= TRUNCATION_LIMIT {
                let mut lo = hi;
                // extrapolate the required lag for the error message
                while !below(lo) && lo < usize::MAX / 4 {
                    lo *= 2;
                }
                return Err(Error::Truncation {
                    required: lo,
                    limit: TRUNCATION_LIMIT,
                });
            }
            hi *= 2;
        }
        let mut lo = 0;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if below(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(if below(lo) { lo } else { hi })
    }

    /// A(z) = Σ_j a_j z^j for z ≥ 0; infinite outside the radius of convergence.
    pub fn generating(&self, z: f64) -> f64 {
        match self {
            Coefficients::Explicit { values, tail } => {
                let head: f64 = values.iter().enumerate().map(|(i, v)| v * z.powi(i as i32 + 1)).sum();
                let l = values.len();
                let last = values.last().copied().unwrap_or(0.0);
                if last == 0.0 {
                    return head;
                }
                match tail {
                    None => head,
                    Some(TailClass::Geometric(r)) => {
                        if r * z >= 1.0 {
                            f64::INFINITY
                        } else {
                            head + last * z.powi(l as i32) * (r * z) / (1.0 - r * z)
                        }
                    }
                    Some(TailClass::Polynomial(a)) => {
                        if z > 1.0 {
                            f64::INFINITY
                        } else if z == 1.0 {
                            head + last * (l as f64).powf(*a) * hurwitz_zeta(*a, l as f64 + 1.0)
                        } else {
                            // geometric weights make the series converge fast
                            let mut s = 0.0;
                            let mut j = l + 1;
                            loop {
                                let term = self.get(j) * z.powi(j as i32);
                                s += term;
                                if term < 1e-18 * (head + s) || j > l + 100_000 {
                                    break;
                                }
                                j += 1;
                            }
                            head + s
                        }
                    }
                }
            }
            Coefficients::Power { scale, exponent } => {
                if z > 1.0 {
                    f64::INFINITY
                } else if z == 1.0 {
                    scale * hurwitz_zeta(*exponent, 1.0)
                } else {
                    let mut s = 0.0;
                    let mut j = 1usize;
                    loop {
                        let term = scale * (j as f64).powf(-exponent) * z.powi(j as i32);
                        s += term;
                        if term < 1e-18 * s || j > 1_000_000 {
                            break;
                        }
                        j += 1;
                    }
                    s
                }
            }
            Coefficients::Geometric { scale, ratio } => {
                if ratio * z >= 1.0 {
                    f64::INFINITY
                } else {
                    scale * ratio * z / (1.0 - ratio * z)
                }
            }
        }
    }

    /// Radius ρ ≥ 1 where A(ρ) = 1, which sets the geometric decay 1/ρ of the
    /// inverse series ψ. Returns `None` when A stays below 1 on its whole
    /// domain of convergence.
    pub fn inversion_radius(&self) -> Option<f64> {
        if self.total() >= 1.0 {
            return Some(1.0);
        }
        let mut hi = 2.0;
        let mut lo = 1.0;
        let mut found = false;
        for _ in 0..200 {
            let v = self.generating(hi);
            if !v.is_finite() || v >= 1.0 {
                found = true;
                break;
            }
            lo = hi;
            hi *= 2.0;
        }
        if !found {
            return None;
        }
        let mut hi_ok = hi;
        // A may jump to +inf at the radius of convergence; bisect on A ≥ 1 or non-finite
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi_ok);
            let v = self.generating(mid);
            if !v.is_finite() || v >= 1.0 {
                hi_ok = mid;
            } else {
                lo = mid;
            }
            if hi_ok - lo < 1e-15 * hi_ok {
                break;
            }
        }
        let v = self.generating(hi_ok);
        if v.is_finite() {
            Some(0.5 * (lo + hi_ok))
        } else {
            // series diverges before reaching 1: decay rate set by convergence radius
            Some(lo)
        }
    }
}
