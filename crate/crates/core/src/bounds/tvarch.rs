//! Explicit-constant mixing bounds for tvARCH(p).
//!
//! ```text
//! weighted:  inf_η [ 2 (K+1)/inf a₀ · Σ_{s<p} w_s·η + 4 M Σ_j η_j^{−1} ]
//!            w_s = weights of Q_{s,k,t}(1, ·),  M = sup E X_τ
//! geometric: 2p √(8 (K+1) K_spec G M / inf a₀) · (1−δ̃)^{k/2}
//!            K_spec = max(1, max_m ‖Ã_{t+m}⋯Ã_{t+1}‖₂ / (1−δ̃)^m)
//!            G = 1 + Σ_{s=1}^{p−1} sup_τ Σ_{i=s}^{p} a_i(τ)(1−δ̃)^{s−i}
//! ```
//! Every weight satisfies Σ_s w_{s,j} ≤ K_spec G (1−δ̃)^k, so the geometric
//! form dominates the weighted one. K is K_iii for α and K_iv for β.

use super::eta::{assemble_envelope, golden_section, EnvelopeTerm};
use crate::error::{Error, Result};
use crate::process_models::{mean_companion, stationary_mean_bound, InnovationModel, Matrix, ProcessSpec, TvArchSpec};
use crate::volterra::q_weights_tvarch;
use serde::Serialize;
use std::ops::Range;

/// Power-method tolerance for spectral norms.
pub const SPECTRAL_TOL: f64 = 1e-10;

/// Which innovation constant enters (K+1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixingKind {
    Alpha,
    Beta,
}

/// Lag-independent constants of the tvARCH assembly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TvArchConstants {
    pub t: i64,
    pub delta_tilde: f64,
    pub k_iii: f64,
    pub k_iv: f64,
    pub inf_a0: f64,
    pub mean_bound: f64,
    pub k_spectral: f64,
    pub g_factor: f64,
    /// Largest lag covered by `k_spectral`.
    pub k_max: usize,
}

impl TvArchConstants {
    fn k_innovation(&self, kind: MixingKind) -> f64 {
        match kind {
            MixingKind::Alpha => self.k_iii,
            MixingKind::Beta => self.k_iv,
        }
    }

    /// 2p √(8 (K+1) K_spec G M / inf a₀), the factor in front of (1−δ̃)^{k/2}.
    pub fn envelope_factor(&self, p: usize, kind: MixingKind) -> f64 {
        let k = self.k_innovation(kind);
        2.0 * p as f64 * (8.0 * (k + 1.0) * self.k_spectral * self.g_factor * self.mean_bound / self.inf_a0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TvArchBound {
    pub k: usize,
    /// Exact-weight assembly.
    pub weighted: f64,
    /// Geometric envelope.
    pub geometric: f64,
    /// Σ_{s<p} w_s, one entry per past coordinate.
    pub weights: Vec<f64>,
}

/// Times at which the spec must be valid for lags up to `k_max`.
fn validity_range(spec: &TvArchSpec, t: i64, k_max: usize) -> Range<i64> {
    let p = spec.order();
    let burn = 10 * p.max(50) as i64;
    t - burn - p as i64..t + (k_max + p) as i64 + 1
}

fn check_delta_tilde(spec: &TvArchSpec, delta_tilde: f64) -> Result<()> {
    if !(delta_tilde > 0.0 && delta_tilde < spec.delta) {
        return Err(Error::validation(
            "delta_tilde",
            format!("must lie in (0, {}), got {delta_tilde}", spec.delta),
        ));
    }
    Ok(())
}

/// Assembles the lag-independent constants for lags up to `k_max`.
pub fn tvarch_constants(
    spec: &TvArchSpec,
    innovation: &InnovationModel,
    t: i64,
    k_max: usize,
    delta_tilde: f64,
) -> Result<TvArchConstants> {
    check_delta_tilde(spec, delta_tilde)?;
    if k_max == 0 {
        return Err(Error::validation("k", "must be at least 1"));
    }
    let p = spec.order();
    let range = validity_range(spec, t, k_max);
    spec.validate(range.clone())?;
    let r = spec.ranges(range.clone());
    if r.sup_sum > 1.0 - spec.delta + 1e-12 {
        return Err(Error::AssumptionViolated {
            clause: "coefficient_sum".into(),
            detail: format!("sup Σ a_j(t) = {} exceeds 1 − δ = {}", r.sup_sum, 1.0 - spec.delta),
        });
    }
    let mean_bound = stationary_mean_bound(&ProcessSpec::TvArch(spec.clone()), range.clone())?;
    let rho = 1.0 - delta_tilde;
    let mut k_spectral: f64 = 1.0;
    let mut prod = Matrix::identity(p);
    for m in 1..=k_max + p {
        prod = mean_companion(spec, t + m as i64).mul(&prod);
        k_spectral = k_spectral.max(prod.spectral_norm(SPECTRAL_TOL) / rho.powi(m as i32));
    }
    let mut g_factor = 1.0;
    for s in 1..p {
        let mut sup: f64 = 0.0;
        for tau in range.clone() {
            let g: f64 = (s..=p).map(|i| spec.a(i, tau) * rho.powi(s as i32 - i as i32)).sum();
            sup = sup.max(g);
        }
        g_factor += sup;
    }
    Ok(TvArchConstants {
        t,
        delta_tilde,
        k_iii: innovation.lipschitz_iii,
        k_iv: innovation.lipschitz_iv,
        inf_a0: r.inf_a0,
        mean_bound,
        k_spectral,
        g_factor,
        k_max,
    })
}

/// Bound at lag `k` from precomputed constants.
pub fn tvarch_bound_with(spec: &TvArchSpec, constants: &TvArchConstants, k: usize, kind: MixingKind) -> Result<TvArchBound> {
    if k == 0 || k > constants.k_max {
        return Err(Error::validation(
            "k",
            format!("must lie in 1..={}, got {k}", constants.k_max),
        ));
    }
    let p = spec.order();
    let t = constants.t;
    let mut weights = vec![0.0; p];
    for s in 0..p {
        for (acc, w) in weights.iter_mut().zip(q_weights_tvarch(spec, s, k, t)?) {
            *acc += w;
        }
    }
    let lip = constants.k_innovation(kind);
    let scale = (lip + 1.0) / constants.inf_a0;
    let tail = EnvelopeTerm::PowerTail {
        weights: vec![constants.mean_bound; p],
        nu: 1.0,
    };
    let weighted = assemble_envelope(&EnvelopeTerm::Linear(weights.iter().map(|w| scale * w).collect()), &tail, p)?.value;
    let rho = 1.0 - constants.delta_tilde;
    let geometric = constants.envelope_factor(p, kind) * rho.powf(k as f64 / 2.0);
    Ok(TvArchBound {
        k,
        weighted,
        geometric,
        weights,
    })
}

/// Geometric envelope recomputed through the generic envelope assembly with
/// every weight replaced by its majorant K_spec G (1−δ̃)^k.
pub fn tvarch_envelope_assembly(spec: &TvArchSpec, constants: &TvArchConstants, k: usize, kind: MixingKind) -> Result<f64> {
    let p = spec.order();
    let lip = constants.k_innovation(kind);
    let w = (lip + 1.0) / constants.inf_a0
        * constants.k_spectral
        * constants.g_factor
        * (1.0 - constants.delta_tilde).powi(k as i32);
    let tail = EnvelopeTerm::PowerTail {
        weights: vec![constants.mean_bound; p],
        nu: 1.0,
    };
    Ok(assemble_envelope(&EnvelopeTerm::Linear(vec![w; p]), &tail, p)?.value)
}

pub fn tvarch_alpha_bound(
    spec: &TvArchSpec,
    innovation: &InnovationModel,
    t: i64,
    k: usize,
    delta_tilde: f64,
) -> Result<TvArchBound> {
    let c = tvarch_constants(spec, innovation, t, k, delta_tilde)?;
    tvarch_bound_with(spec, &c, k, MixingKind::Alpha)
}

pub fn tvarch_beta_bound(
    spec: &TvArchSpec,
    innovation: &InnovationModel,
    t: i64,
    k: usize,
    delta_tilde: f64,
) -> Result<TvArchBound> {
    let c = tvarch_constants(spec, innovation, t, k, delta_tilde)?;
    tvarch_bound_with(spec, &c, k, MixingKind::Beta)
}

/// δ̃ ∈ (0, δ) minimising the geometric α-bound at lag `k`.
pub fn optimize_delta_tilde(spec: &TvArchSpec, innovation: &InnovationModel, t: i64, k: usize) -> Result<f64> {
    let delta = spec.delta;
    let eval = |dt: f64| {
        tvarch_alpha_bound(spec, innovation, t, k, dt)
            .map(|b| b.geometric)
            .unwrap_or(f64::INFINITY)
    };
    let (best, value) = golden_section(eval, 0.01 * delta, 0.999 * delta, 1e-4 * delta);
    if !value.is_finite() {
        return Err(Error::Contract("no admissible delta_tilde found".into()));
    }
    Ok(best)
}

/// Norms of the backward products Ã_t Ã_{t−1} ⋯ Ã_{t−k+1}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub delta_tilde: f64,
    /// Spectral norm of the k-fold product at index k−1.
    pub norms: Vec<f64>,
    /// Smallest K with norm_k ≤ K (1−δ̃)^k over the range.
    pub k_constant: f64,
    pub finite: bool,
    /// ∞-norms of the products of consecutive p-blocks Ã_{t−bp}⋯Ã_{t−bp−p+1}.
    pub block_row_sums: Vec<f64>,
    pub max_block_row_sum: f64,
}

pub fn spectral_product_decay(spec: &TvArchSpec, t: i64, k_max: usize, delta_tilde: f64) -> Result<DecayReport> {
    check_delta_tilde(spec, delta_tilde)?;
    let p = spec.order();
    if k_max < p {
        return Err(Error::validation("k_max", format!("must be at least p = {p}, got {k_max}")));
    }
    spec.validate(t - k_max as i64 + 1..t + 1)?;
    let rho = 1.0 - delta_tilde;
    let mut prod = Matrix::identity(p);
    let mut norms = Vec::with_capacity(k_max);
    let mut k_constant: f64 = 0.0;
    for i in 0..k_max {
        prod = prod.mul(&mean_companion(spec, t - i as i64));
        let n = prod.spectral_norm(SPECTRAL_TOL);
        k_constant = k_constant.max(n / rho.powi(i as i32 + 1));
        norms.push(n);
    }
    let mut block_row_sums = Vec::new();
    for b in 0..k_max / p {
        let mut block = Matrix::identity(p);
        for i in 0..p {
            block = block.mul(&mean_companion(spec, t - (b * p + i) as i64));
        }
        block_row_sums.push(block.norm_inf());
    }
    let max_block_row_sum = block_row_sums.iter().copied().fold(0.0, f64::max);
    Ok(DecayReport {
        delta_tilde,
        norms,
        k_constant,
        finite: k_constant.is_finite(),
        block_row_sums,
        max_block_row_sum,
    })
}
