//! Total-variation distances between scale mixtures of the innovation
//! density and numerical certification of its Lipschitz constants.
//!
//! ```text
//! tv(A, B)  = ∫ | f(y/(A+B))/(A+B) − f(y/A)/A | dy
//! bound     = K_iii · B/A + B/(A+B)
//! K_iii     ≥ (1/a) ∫ |f(u) − f(u(1+a))| du
//! K_iv      ≥ (1/a) ∫ sup_{τ≤a} |f(u) − f(u(1+τ))| du
//! ```

use crate::error::{Error, Result};
use crate::process_models::{InnovationLaw, InnovationModel};
use crate::quadrature::{integrate, QuadOptions};

/// Upper tail mass ignored when truncating integration domains.
pub const TAIL_MASS: f64 = 1e-12;
/// Absolute quadrature tolerance.
pub const QUAD_TOL: f64 = 1e-9;
/// Number of log-spaced τ values used for the inner supremum.
pub const TAU_POINTS: usize = 16;
/// Slack allowed when asserting tv ≤ bound.
pub const DOMINANCE_SLACK: f64 = 1e-6;

/// Outcome of [`innovation_tv_lipschitz`].
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzCertificate {
    pub law: InnovationLaw,
    pub a_grid: Vec<f64>,
    /// (1/a) ∫ |f(u) − f(u(1+a))| du per grid point.
    pub ratios_iii: Vec<f64>,
    /// (1/a) ∫ sup_τ |f(u) − f(u(1+τ))| du per grid point.
    pub ratios_iv: Vec<f64>,
    /// τ-subgrid resolution used for the inner supremum.
    pub tau_points: usize,
    /// Small-a limit ∫ |u f'(u)| du.
    pub small_a_limit: f64,
    pub k_iii: f64,
    pub k_iv: f64,
}

/// 64 log-spaced points in [1e-3, 4].
pub fn default_a_grid() -> Vec<f64> {
    log_space(1e-3, 4.0, 64)
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l, h) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn opts(abs_tol: f64) -> QuadOptions {
    QuadOptions {
        abs_tol,
        rel_tol: 1e-13,
        max_intervals: 20_000,
    }
}

/// ∫_0^upper g(y) dy for integrands built from `law` at the given scales.
/// Breakpoints are the law's kinks times each scale. When the law is
/// singular at 0, the piece [0, s] is integrated in v = √y.
fn scaled_integral(law: &InnovationLaw, g: impl Fn(f64) -> f64, scales: &[f64], abs_tol: f64) -> Result<f64> {
    let smin = scales.iter().copied().fold(f64::INFINITY, f64::min);
    let smax = scales.iter().copied().fold(0.0, f64::max);
    let upper = (law.upper_cut(TAIL_MASS) * smax).min(law.support_max() * smax);
    let mut pts: Vec<f64> = scales
        .iter()
        .flat_map(|s| law.kinks().into_iter().map(move |k| k * s))
        .chain(scales.iter().map(|s| s * law.upper_cut(TAIL_MASS).min(law.support_max())))
        .filter(|&x| x > 0.0 && x < upper)
        .collect();
    let mut start = 0.0;
    let mut head = 0.0;
    if law.singular_at_zero() {
        let split = smin.min(upper);
        let r = integrate(|v| 2.0 * v * g(v * v), &[0.0, split.sqrt()], opts(0.5 * abs_tol))?;
        head = r.value;
        start = split;
        pts.retain(|&x| x > split);
    }
    pts.push(start);
    pts.push(upper);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let r = integrate(&g, &pts, opts(0.5 * abs_tol))?;
    Ok(head + r.value)
}

fn lipschitz_ratio(law: &InnovationLaw, a: f64) -> Result<f64> {
    let v = scaled_integral(
        law,
        |u| (law.pdf(u) - law.pdf(u * (1.0 + a))).abs(),
        &[1.0, 1.0 / (1.0 + a)],
        QUAD_TOL * a.min(1.0),
    )
    .map_err(|e| relabel(e, a))?;
    Ok(v / a)
}

fn sup_lipschitz_ratio(law: &InnovationLaw, a: f64) -> Result<f64> {
    let taus = log_space(a * 1e-3, a, TAU_POINTS);
    let mut scales = vec![1.0];
    scales.extend(taus.iter().map(|t| 1.0 / (1.0 + t)));
    let v = scaled_integral(
        law,
        |u| {
            let f0 = law.pdf(u);
            taus.iter()
                .map(|t| (f0 - law.pdf(u * (1.0 + t))).abs())
                .fold(0.0, f64::max)
        },
        &scales,
        QUAD_TOL * a.min(1.0),
    )
    .map_err(|e| relabel(e, a))?;
    Ok(v / a)
}

fn relabel(e: Error, a: f64) -> Error {
    match e {
        Error::Quadrature { error, .. } => Error::Quadrature { at: a, error },
        other => other,
    }
}

/// Certifies K_iii and K_iv on `a_grid`.
///
/// The reported constants are the maximum of the grid ratios, the small-a
/// limit ∫|u f'(u)| du, and 2/max(a_grid) (the integral never exceeds 2,
/// which covers a beyond the grid).
pub fn innovation_tv_lipschitz(law: &InnovationLaw, a_grid: &[f64]) -> Result<LipschitzCertificate> {
    if a_grid.is_empty() {
        return Err(Error::validation("a_grid", "must be nonempty"));
    }
    if let Some(&a) = a_grid.iter().find(|&&a| !(a > 0.0 && a.is_finite())) {
        return Err(Error::validation("a_grid", format!("entries must be positive, got {a}")));
    }
    let ratios_iii = a_grid
        .iter()
        .map(|&a| lipschitz_ratio(law, a))
        .collect::<Result<Vec<_>>>()?;
    let ratios_iv = a_grid
        .iter()
        .map(|&a| sup_lipschitz_ratio(law, a))
        .collect::<Result<Vec<_>>>()?;
    let a_max = a_grid.iter().copied().fold(0.0, f64::max);
    let small_a_limit = law.scale_derivative_mass();
    let k_iii = ratios_iii
        .iter()
        .copied()
        .fold(small_a_limit.max(2.0 / a_max), f64::max);
    let k_iv = ratios_iv.iter().copied().fold(k_iii, f64::max);
    Ok(LipschitzCertificate {
        law: *law,
        a_grid: a_grid.to_vec(),
        ratios_iii,
        ratios_iv,
        tau_points: TAU_POINTS,
        small_a_limit,
        k_iii,
        k_iv,
    })
}

/// One (A, B) evaluation of the scale-mixture inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvPoint {
    pub a: f64,
    pub b: f64,
    pub tv: f64,
    pub bound: f64,
}

impl TvPoint {
    pub fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.tv / self.bound
        } else {
            0.0
        }
    }
}

/// TV distance between the scale-A and scale-(A+B) versions of the
/// innovation density, without the dominance check.
pub fn scale_mixture_tv_value(law: &InnovationLaw, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::validation("A", format!("must be positive, got {a}")));
    }
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::validation("B", format!("must be nonnegative, got {b}")));
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    let c = a + b;
    scaled_integral(
        law,
        |y| (law.pdf(y / c) / c - law.pdf(y / a) / a).abs(),
        &[a, c],
        QUAD_TOL,
    )
}

/// TV distance and its bound K_iii·B/A + B/(A+B); fails if the distance
/// exceeds the bound by more than [`DOMINANCE_SLACK`].
pub fn scale_mixture_tv(model: &InnovationModel, a: f64, b: f64) -> Result<TvPoint> {
    let tv = scale_mixture_tv_value(&model.law, a, b)?;
    let bound = model.lipschitz_iii * b / a + b / (a + b);
    if tv > bound + DOMINANCE_SLACK {
        return Err(Error::InternalConsistency {
            check: format!("scale-mixture dominance at A={a}, B={b}"),
            rel_err: tv / bound - 1.0,
        });
    }
    Ok(TvPoint { a, b, tv, bound })
}

/// Dominance report over a set of (A, B) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct TvReport {
    pub points: Vec<TvPoint>,
    pub ratio_max: f64,
}

pub fn tv_report(model: &InnovationModel, pairs: &[(f64, f64)]) -> Result<TvReport> {
    let points = pairs
        .iter()
        .map(|&(a, b)| scale_mixture_tv(model, a, b))
        .collect::<Result<Vec<_>>>()?;
    let ratio_max = points.iter().map(TvPoint::ratio).fold(0.0, f64::max);
    Ok(TvReport { points, ratio_max })
}

/// The (A, B) grid {0.5, 1, 2} × {0, 0.1, 1, 10}.
pub fn standard_pairs() -> Vec<(f64, f64)> {
    let mut v = Vec::new();
    for a in [0.5, 1.0, 2.0] {
        for b in [0.0, 0.1, 1.0, 10.0] {
            v.push((a, b));
        }
    }
    v
}

/// Supremum form over a finite family:
/// ∫ sup_j |f(y/(A+B_j))/(A+B_j) − f(y/A)/A| dy together with its bound
/// K_iv · max_j B_j/A + max_j B_j/(A+B_j).
pub fn sup_family_tv(model: &InnovationModel, a: f64, bs: &[f64]) -> Result<(f64, f64)> {
    if !(a > 0.0) || bs.is_empty() || bs.iter().any(|&b| !(b >= 0.0 && b.is_finite())) {
        return Err(Error::validation("family", "need A > 0 and a nonempty family of B_j ≥ 0"));
    }
    let law = model.law;
    let mut scales = vec![a];
    scales.extend(bs.iter().map(|b| a + b));
    let value = scaled_integral(
        &law,
        |y| {
            let base = law.pdf(y / a) / a;
            bs.iter()
                .map(|b| (law.pdf(y / (a + b)) / (a + b) - base).abs())
                .fold(0.0, f64::max)
        },
        &scales,
        QUAD_TOL,
    )?;
    let bmax_ratio = bs.iter().map(|b| b / a).fold(0.0, f64::max);
    let second = bs.iter().map(|b| b / (a + b)).fold(0.0, f64::max);
    Ok((value, model.lipschitz_iv * bmax_ratio + second))
}

/// Conditional density (1/(P+Q)) f(y/(P+Q)) of Z·(P+Q) given P and Q.
pub fn conditional_density(law: &InnovationLaw, p_term: f64, q_term: f64, y: f64) -> Result<f64> {
    if !(p_term > 0.0) {
        return Err(Error::validation("p_term", format!("must be positive, got {p_term}")));
    }
    if !(q_term >= 0.0) {
        return Err(Error::validation("q_term", format!("must be nonnegative, got {q_term}")));
    }
    let s = p_term + q_term;
    Ok(law.pdf(y / s) / s)
}

/// ∫ conditional_density dy over [0, ∞), for normalization checks.
pub fn conditional_density_mass(law: &InnovationLaw, p_term: f64, q_term: f64) -> Result<f64> {
    conditional_density(law, p_term, q_term, 0.0)?;
    let s = p_term + q_term;
    scaled_integral(law, |y| law.pdf(y / s) / s, &[s], 1e-11)
}
