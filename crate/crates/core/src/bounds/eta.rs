//! Threshold optimisation for the envelope 2·(TV sum) + 4·P(Eᶜ).
//!
//! ```text
//! inf_η Σ_i (c_i η_i + d_i η_i^{−ν}) = F(ν) Σ_i c_i^θ d_i^{1−θ}
//! θ = ν/(ν+1),  F(ν) = ν^{1/(1+ν)} + ν^{−θ},  η_i = (ν d_i / c_i)^{1/(1+ν)}
//! ```

use crate::error::{Error, Result};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Per-coordinate tolerance (in log η) of the numeric searches.
pub const SEARCH_TOL: f64 = 1e-10;

/// Minimise Σ c_i η_i + d_i η_i^{−ν} over η > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaProblem {
    pub c: Vec<f64>,
    pub d: Vec<f64>,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaSolution {
    pub value: f64,
    pub eta: Vec<f64>,
}

impl EtaProblem {
    pub fn new(c: Vec<f64>, d: Vec<f64>, nu: f64) -> Result<Self> {
        if c.len() != d.len() {
            return Err(Error::validation(
                "c/d",
                format!("lengths differ ({} vs {})", c.len(), d.len()),
            ));
        }
        if c.is_empty() {
            return Err(Error::validation("c", "must be nonempty"));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::validation("nu", format!("must be positive, got {nu}")));
        }
        for (name, v) in [("c", &c), ("d", &d)] {
            if let Some(x) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::validation(name, format!("entries must be positive, got {x}")));
            }
        }
        Ok(EtaProblem { c, d, nu })
    }

    pub fn objective(&self, eta: &[f64]) -> f64 {
        self.c
            .iter()
            .zip(&self.d)
            .zip(eta)
            .map(|((c, d), e)| c * e + d * e.powf(-self.nu))
            .sum()
    }
}

/// F(ν) = ν^{1/(1+ν)} + ν^{−ν/(ν+1)}.
pub fn eta_constant(nu: f64) -> f64 {
    nu.powf(1.0 / (1.0 + nu)) + nu.powf(-nu / (nu + 1.0))
}

/// K(ν) = 3 F(ν), the packaged constant of the ARCH(∞) bounds.
pub fn packaged_constant(nu: f64) -> f64 {
    3.0 * eta_constant(nu)
}

/// Closed-form infimum and minimiser.
pub fn minimize_eta(problem: &EtaProblem) -> EtaSolution {
    let nu = problem.nu;
    let theta = nu / (nu + 1.0);
    let f = eta_constant(nu);
    let value = f * problem
        .c
        .iter()
        .zip(&problem.d)
        .map(|(c, d)| c.powf(theta) * d.powf(1.0 - theta))
        .sum::<f64>();
    let eta = problem
        .c
        .iter()
        .zip(&problem.d)
        .map(|(c, d)| (nu * d / c).powf(1.0 / (1.0 + nu)))
        .collect();
    EtaSolution { value, eta }
}

/// Closed-form value allowing zero weights: a term with c_i = 0 or d_i = 0
/// has infimum 0 (η_i → ∞ or η_i → 0).
pub(crate) fn relaxed_value(c: &[f64], d: &[f64], nu: f64) -> f64 {
    let theta = nu / (nu + 1.0);
    eta_constant(nu)
        * c.iter()
            .zip(d)
            .filter(|(c, d)| **c > 0.0 && **d > 0.0)
            .map(|(c, d)| c.powf(theta) * d.powf(1.0 - theta))
            .sum::<f64>()
}

/// Golden-section minimisation of a unimodal `f` on [lo, hi]; returns (x, f(x)).
pub(crate) fn golden_section(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Per-coordinate golden-section search over log η ∈ [−50, 50]. The problem
/// is separable, so one pass per coordinate is exact up to `tol`.
pub fn minimize_eta_numeric(problem: &EtaProblem, tol: f64) -> EtaSolution {
    let nu = problem.nu;
    let mut value = 0.0;
    let mut eta = Vec::with_capacity(problem.c.len());
    for (&c, &d) in problem.c.iter().zip(&problem.d) {
        let g = |u: f64| c * u.exp() + d * (-nu * u).exp();
        let (u, v) = golden_section(g, -50.0, 50.0, tol);
        value += v;
        eta.push(u.exp());
    }
    EtaSolution { value, eta }
}

/// One side of the envelope as a function of the threshold vector η.
pub enum EnvelopeTerm<'a> {
    /// Σ w_i η_i
    Linear(Vec<f64>),
    /// Σ v_i η_i^{−ν}
    PowerTail { weights: Vec<f64>, nu: f64 },
    General(&'a dyn Fn(&[f64]) -> f64),
}

impl EnvelopeTerm<'_> {
    fn eval(&self, eta: &[f64]) -> f64 {
        match self {
            EnvelopeTerm::Linear(w) => w.iter().zip(eta).map(|(w, e)| w * e).sum(),
            EnvelopeTerm::PowerTail { weights, nu } => weights
                .iter()
                .zip(eta)
                .map(|(v, e)| if *v == 0.0 { 0.0 } else { v * e.powf(-nu) })
                .sum(),
            EnvelopeTerm::General(f) => f(eta),
        }
    }

    fn check_len(&self, dim: usize, name: &str) -> Result<()> {
        let len = match self {
            EnvelopeTerm::Linear(w) => w.len(),
            EnvelopeTerm::PowerTail { weights, .. } => weights.len(),
            EnvelopeTerm::General(_) => return Ok(()),
        };
        if len != dim {
            return Err(Error::validation(name, format!("expected {dim} weights, got {len}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeBound {
    pub value: f64,
    pub eta: Vec<f64>,
    /// True when the closed-form minimiser was used.
    pub closed_form: bool,
}

/// inf_η 2·tv_sum(η) + 4·tail_prob(η) over η ∈ (0, ∞)^dim.
pub fn assemble_envelope(tv_sum: &EnvelopeTerm, tail_prob: &EnvelopeTerm, dim: usize) -> Result<EnvelopeBound> {
    if dim == 0 {
        return Err(Error::validation("dim", "must be at least 1"));
    }
    tv_sum.check_len(dim, "tv_sum")?;
    tail_prob.check_len(dim, "tail_prob")?;
    if let (EnvelopeTerm::Linear(w), EnvelopeTerm::PowerTail { weights, nu }) = (tv_sum, tail_prob) {
        if let Some(x) = w.iter().chain(weights).find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::validation("weights", format!("must be finite and nonnegative, got {x}")));
        }
        let c: Vec<f64> = w.iter().map(|w| 2.0 * w).collect();
        let d: Vec<f64> = weights.iter().map(|v| 4.0 * v).collect();
        let value = relaxed_value(&c, &d, *nu);
        let eta = c
            .iter()
            .zip(&d)
            .map(|(c, d)| match (*c > 0.0, *d > 0.0) {
                (true, true) => (nu * d / c).powf(1.0 / (1.0 + nu)),
                (false, true) => f64::INFINITY,
                _ => 0.0,
            })
            .collect();
        return Ok(EnvelopeBound {
            value,
            eta,
            closed_form: true,
        });
    }
    check_monotone(tv_sum, tail_prob, dim)?;
    let total = |eta: &[f64]| 2.0 * tv_sum.eval(eta) + 4.0 * tail_prob.eval(eta);
    let mut eta = vec![1.0; dim];
    let mut current = total(&eta);
    for _ in 0..200 {
        let before = current;
        for i in 0..dim {
            let mut trial = eta.clone();
            let g = |u: f64| {
                trial[i] = u.exp();
                total(&trial)
            };
            let (u, v) = golden_section(g, -40.0, 40.0, SEARCH_TOL);
            let mut best = (u.exp(), v);
            for edge in [0.0, f64::INFINITY] {
                let mut probe = eta.clone();
                probe[i] = edge;
                let fv = total(&probe);
                if fv.is_finite() && fv < best.1 {
                    best = (edge, fv);
                }
            }
            if best.1 <= current {
                eta[i] = best.0;
                current = best.1;
            }
        }
        if before - current <= 1e-13 * before.abs() {
            break;
        }
    }
    Ok(EnvelopeBound {
        value: current,
        eta,
        closed_form: false,
    })
}

fn check_monotone(tv_sum: &EnvelopeTerm, tail_prob: &EnvelopeTerm, dim: usize) -> Result<()> {
    for base in [0.1, 1.0, 10.0] {
        let eta = vec![base; dim];
        let tv0 = tv_sum.eval(&eta);
        let tail0 = tail_prob.eval(&eta);
        for i in 0..dim {
            let mut up = eta.clone();
            up[i] *= 4.0;
            let slack = |v: f64| 1e-12 * v.abs().max(1e-300);
            if tv_sum.eval(&up) < tv0 - slack(tv0) {
                return Err(Error::Contract(format!(
                    "tv_sum decreases in coordinate {i} near eta = {base}"
                )));
            }
            if tail_prob.eval(&up) > tail0 + slack(tail0) {
                return Err(Error::Contract(format!(
                    "tail_prob increases in coordinate {i} near eta = {base}"
                )));
            }
        }
    }
    Ok(())
}
