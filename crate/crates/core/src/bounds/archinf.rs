//! Mixing bounds for ARCH(∞).
//!
//! ```text
//! α/β bracket  b_i = (1/a₀) Σ_{s≥0} { Σ_{j=s+1}^{k+s} a_j Σ_{l=0}^{k+s−j} ψ_l a_{k+s−j−l+i} + a_{k+s+i} }
//!                  = (1/a₀) [ Σ_{n=0}^{k−1} a_{n+i} V(n) + T(k+i) ]
//!              V(n) = Σ_{l=0}^{k−1−n} ψ_l T(k−n−l),  T(u) = Σ_{v≥u} a_v
//! 2-mix bracket b_i = (1/a₀) Σ_{j=0}^{k−1} ψ_j a_{k−j+i}
//! packaged     K(ν) Σ_i b_i^θ E^{1−θ},  θ = ν/(ν+1)
//! tight        inf_η [ 2 Σ_i b_i η_i + 4 E Σ_i η_i^{−ν} ] = F(ν) 2^θ 4^{1−θ} Σ_i b_i^θ E^{1−θ}
//! ```
//! Coefficient index 0 is the intercept and never enters a bracket.
//! The i-sum is truncated at I with an analytic certificate for i > I
//! derived from the coefficient majorant, and the certificate is added.

use super::eta::{eta_constant, packaged_constant};
use crate::error::{Error, Result};
use crate::process_models::{ArchInfSpec, Coefficients, InnovationModel, MajorantKind};
use crate::special::hurwitz_zeta;
use crate::volterra::PsiTable;
use serde::Serialize;

/// Largest i-truncation the automatic search will try.
pub const I_LIMIT: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq)]
pub struct ArchInfBoundConfig {
    /// Truncate the s-sum at this index; the neglected part is certified
    /// exactly from analytic tail sums. `None` sums to infinity directly.
    pub s_max: Option<usize>,
    /// Truncate the i-sum here; `None` chooses I automatically.
    pub i_max: Option<usize>,
    /// Automatic I stops once the i-tail certificate is at most this
    /// fraction of the head sum.
    pub tail_fraction: f64,
    /// Use a_j ψ_j instead of ψ_j in the 2-mixing bracket.
    pub literal_two_mix: bool,
}

impl Default for ArchInfBoundConfig {
    fn default() -> Self {
        ArchInfBoundConfig {
            s_max: None,
            i_max: None,
            tail_fraction: 1.0,
            literal_two_mix: false,
        }
    }
}

/// Where the bound on E|X₀|^ν came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentSource {
    User,
    StationaryMean,
    Minkowski,
}

/// Bound on E|X₀|^ν: the user value, else a₀/(1−Σa) for ν = 1, else
/// (‖Z‖_ν a₀ / (1 − ‖Z‖_ν Σa))^ν.
pub fn moment_bound(spec: &ArchInfSpec, innovation: &InnovationModel) -> Result<(f64, MomentSource)> {
    spec.validate()?;
    if let Some(m) = spec.moment_bound {
        return Ok((m, MomentSource::User));
    }
    let total = spec.coeffs.total();
    if spec.nu == 1.0 {
        if total >= 1.0 {
            return Err(Error::Divergence { sum: total });
        }
        return Ok((spec.intercept / (1.0 - total), MomentSource::StationaryMean));
    }
    let norm = innovation.abs_moment(spec.nu).powf(1.0 / spec.nu);
    let factor = norm * total;
    if factor >= 1.0 {
        return Err(Error::AssumptionViolated {
            clause: "moment_condition".into(),
            detail: format!("‖Z‖_ν Σ a_j = {factor} ≥ 1; supply moment_bound"),
        });
    }
    Ok(((norm * spec.intercept / (1.0 - factor)).powf(spec.nu), MomentSource::Minkowski))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchInfBound {
    pub k: usize,
    /// K(ν) Σ b_i^θ E^{1−θ} plus certificates.
    pub packaged: f64,
    /// Closed-form infimum of the threshold envelope plus certificates.
    pub tight: f64,
    pub i_max: usize,
    /// Σ_{i>I} b_i^θ majorant (before the constant factor).
    pub i_tail_certificate: f64,
    /// Part of Σ b_i^θ contributed by s > s_max (zero when untruncated).
    pub s_tail_certificate: f64,
    /// Σ_{i≤I} b_i^θ.
    pub head: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArchInfConstants {
    pub nu: f64,
    pub theta: f64,
    pub k_nu: f64,
    pub eta_constant: f64,
    pub moment_bound: f64,
    pub moment_source: MomentSource,
    pub k_iii: f64,
    pub k_iv: f64,
}

pub fn archinf_constants(spec: &ArchInfSpec, innovation: &InnovationModel) -> Result<ArchInfConstants> {
    let (moment, source) = moment_bound(spec, innovation)?;
    let nu = spec.nu;
    Ok(ArchInfConstants {
        nu,
        theta: nu / (nu + 1.0),
        k_nu: packaged_constant(nu),
        eta_constant: eta_constant(nu),
        moment_bound: moment,
        moment_source: source,
        k_iii: innovation.lipschitz_iii,
        k_iv: innovation.lipschitz_iv,
    })
}

impl ArchInfConstants {
    fn packaged_factor(&self) -> f64 {
        self.k_nu * self.moment_bound.powf(1.0 - self.theta)
    }

    fn tight_factor(&self) -> f64 {
        self.eta_constant * 2f64.powf(self.theta) * 4f64.powf(1.0 - self.theta) * self.moment_bound.powf(1.0 - self.theta)
    }

    fn finish(&self, k: usize, i_max: usize, head: f64, i_cert: f64, s_cert: f64) -> ArchInfBound {
        let sum = head + i_cert + s_cert;
        ArchInfBound {
            k,
            packaged: self.packaged_factor() * sum,
            tight: self.tight_factor() * sum,
            i_max,
            i_tail_certificate: i_cert,
            s_tail_certificate: s_cert,
            head,
        }
    }
}

/// Coefficients a_0..=n (a_0 = 0) and tails T(0..=n+1) with T(u) = Σ_{v≥max(u,1)} a_v.
fn coefficient_tables(coeffs: &Coefficients, n: usize) -> (Vec<f64>, Vec<f64>) {
    let a = coeffs.prefix(n);
    let mut t = vec![0.0; n + 2];
    t[n + 1] = coeffs.tail_sum(n + 1);
    for u in (1..=n).rev() {
        t[u] = t[u + 1] + a[u];
    }
    t[0] = t[1];
    (a, t)
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::validation("k", "must be at least 1"));
    }
    Ok(())
}

/// Smallest admissible i-truncation: past the explicit coefficients.
fn min_i(coeffs: &Coefficients) -> usize {
    coeffs.majorant().start.saturating_sub(1)
}

/// Bracket terms b_0..=b_I for the α/β bound, with the s-sum cut at `s_max`.
fn alpha_brackets(spec: &ArchInfSpec, psi: &[f64], a: &[f64], tails: &[f64], k: usize, i_max: usize, s_max: Option<usize>) -> Vec<f64> {
    let t_trunc = |u: usize| -> f64 {
        let full = tails[u];
        match s_max {
            None => full,
            Some(s) => full - tails.get(u + s + 1).copied().unwrap_or(0.0),
        }
    };
    let v: Vec<f64> = (0..k)
        .map(|n| (0..k - n).map(|l| psi[l] * t_trunc(k - n - l)).sum())
        .collect();
    (0..=i_max)
        .map(|i| {
            let conv: f64 = v.iter().enumerate().map(|(n, vn)| a[n + i] * vn).sum();
            (conv + t_trunc(k + i)) / spec.intercept
        })
        .collect()
}

/// Σ_{i>I} b_i^θ majorant for brackets of the form
/// (1/a₀)[Σ_n a_{n+i} W_n + T(k+i)] (set `with_tail` false to drop T).
fn i_tail_certificate(coeffs: &Coefficients, a0: f64, w: &[f64], k: usize, i_max: usize, theta: f64, with_tail: bool) -> Result<f64> {
    let maj = coeffs.majorant();
    debug_assert!(i_max + 1 >= maj.start);
    match maj.kind {
        MajorantKind::Zero => Ok(0.0),
        MajorantKind::Power { c, alpha } => {
            let first = alpha * theta;
            let second = (alpha - 1.0) * theta;
            if first <= 1.0 || (with_tail && second <= 1.0) {
                return Err(Error::AssumptionViolated {
                    clause: "bracket_summability".into(),
                    detail: format!(
                        "polynomial tail exponent {alpha} with θ = {theta} leaves Σ_i b_i^θ divergent"
                    ),
                });
            }
            let w_sum: f64 = w.iter().sum();
            let mut cert = (c * w_sum / a0).powf(theta) * hurwitz_zeta(first, (i_max + 1) as f64);
            if with_tail {
                cert += (c * alpha / ((alpha - 1.0) * a0)).powf(theta) * hurwitz_zeta(second, (k + i_max + 1) as f64);
            }
            Ok(cert)
        }
        MajorantKind::Geometric { c, r } => {
            let w_r: f64 = w.iter().enumerate().map(|(n, wn)| wn * r.powi(n as i32)).sum();
            let rt = r.powf(theta);
            let mut cert = (c * w_r / a0).powf(theta) * r.powf(theta * (i_max + 1) as f64) / (1.0 - rt);
            if with_tail {
                cert += (c / ((1.0 - r) * a0)).powf(theta) * r.powf(theta * (k + i_max + 1) as f64) / (1.0 - rt);
            }
            Ok(cert)
        }
    }
}

/// Runs `eval(I)` for doubling I from `auto_start` until the certificate is
/// at most `fraction` × head, or once for a fixed I ≥ `floor`.
fn search_i(
    fixed: Option<usize>,
    floor: usize,
    auto_start: usize,
    fraction: f64,
    mut eval: impl FnMut(usize) -> Result<(f64, f64)>,
) -> Result<(usize, f64, f64)> {
    if let Some(i) = fixed {
        if i < floor {
            return Err(Error::Truncation {
                required: floor,
                limit: i,
            });
        }
        let (head, cert) = eval(i)?;
        return Ok((i, head, cert));
    }
    let mut i = auto_start.max(floor);
    loop {
        let (head, cert) = eval(i)?;
        if cert <= fraction * head || cert == 0.0 {
            return Ok((i, head, cert));
        }
        if i >= I_LIMIT {
            return Err(Error::Truncation {
                required: 2 * i,
                limit: I_LIMIT,
            });
        }
        i = (2 * i).min(I_LIMIT);
    }
}

/// Starting I for the automatic search.
fn auto_start(coeffs: &Coefficients, k: usize) -> usize {
    match coeffs.support_end() {
        Some(end) => end,
        None => min_i(coeffs).max(4 * k).max(64),
    }
}

fn validate_config(config: &ArchInfBoundConfig) -> Result<()> {
    if !(config.tail_fraction > 0.0 && config.tail_fraction.is_finite()) {
        return Err(Error::validation("tail_fraction", "must be positive"));
    }
    Ok(())
}

/// α/β bound at lag k (α and β share the bracket).
pub fn archinf_alpha_beta_bound(
    spec: &ArchInfSpec,
    innovation: &InnovationModel,
    k: usize,
    config: &ArchInfBoundConfig,
) -> Result<ArchInfBound> {
    check_k(k)?;
    validate_config(config)?;
    let constants = archinf_constants(spec, innovation)?;
    let psi_table = PsiTable::new(&spec.coeffs)?;
    alpha_beta_with(spec, &constants, &psi_table, k, config)
}

pub(crate) fn alpha_beta_with(
    spec: &ArchInfSpec,
    constants: &ArchInfConstants,
    psi_table: &PsiTable,
    k: usize,
    config: &ArchInfBoundConfig,
) -> Result<ArchInfBound> {
    let theta = constants.theta;
    let psi = psi_table.prefix(k);
    let mut s_cert = 0.0;
    let floor = min_i(&spec.coeffs);
    let start = auto_start(&spec.coeffs, k);
    let (i_max, head, i_cert) = search_i(config.i_max, floor, start, config.tail_fraction, |i| {
        let s_extra = config.s_max.map(|s| s + 1).unwrap_or(0);
        let (a, tails) = coefficient_tables(&spec.coeffs, k + i + s_extra + 1);
        let full = alpha_brackets(spec, &psi, &a, &tails, k, i, None);
        let w = s_weights(&psi, &tails, k);
        let cert = i_tail_certificate(&spec.coeffs, spec.intercept, &w, k, i, theta, true)?;
        let full_head: f64 = full.iter().map(|b| b.powf(theta)).sum();
        if config.s_max.is_some() {
            let trunc = alpha_brackets(spec, &psi, &a, &tails, k, i, config.s_max);
            let trunc_head: f64 = trunc.iter().map(|b| b.powf(theta)).sum();
            s_cert = full_head - trunc_head;
            Ok((trunc_head, cert))
        } else {
            Ok((full_head, cert))
        }
    })?;
    Ok(constants.finish(k, i_max, head, i_cert, s_cert))
}

/// V(n) weights of the α/β bracket.
fn s_weights(psi: &[f64], tails: &[f64], k: usize) -> Vec<f64> {
    (0..k)
        .map(|n| (0..k - n).map(|l| psi[l] * tails[k - n - l]).sum())
        .collect()
}

/// 2-mixing bound at lag k.
pub fn archinf_two_mix_bound(
    spec: &ArchInfSpec,
    innovation: &InnovationModel,
    k: usize,
    config: &ArchInfBoundConfig,
) -> Result<ArchInfBound> {
    check_k(k)?;
    validate_config(config)?;
    let constants = archinf_constants(spec, innovation)?;
    let psi_table = PsiTable::new(&spec.coeffs)?;
    two_mix_with(spec, &constants, &psi_table, k, config)
}

pub(crate) fn two_mix_with(
    spec: &ArchInfSpec,
    constants: &ArchInfConstants,
    psi_table: &PsiTable,
    k: usize,
    config: &ArchInfBoundConfig,
) -> Result<ArchInfBound> {
    let theta = constants.theta;
    let psi = psi_table.prefix(k);
    let weights: Vec<f64> = (0..k)
        .map(|j| {
            if config.literal_two_mix {
                psi[j] * spec.coeffs.get(j)
            } else {
                psi[j]
            }
        })
        .collect();
    // b_i = (1/a₀) Σ_n a_{n+i} W_n with n = k − j, W_n = weights[k − n]
    let w_by_n: Vec<f64> = (0..=k).map(|n| if n == 0 { 0.0 } else { weights[k - n] }).collect();
    let floor = min_i(&spec.coeffs);
    let start = auto_start(&spec.coeffs, k);
    let (i_max, head, i_cert) = search_i(config.i_max, floor, start, config.tail_fraction, |i| {
        let a = spec.coeffs.prefix(k + i);
        let head: f64 = (0..=i)
            .map(|ii| {
                let b: f64 = w_by_n.iter().enumerate().map(|(n, w)| a[n + ii] * w).sum::<f64>() / spec.intercept;
                b.powf(theta)
            })
            .sum();
        let cert = i_tail_certificate(&spec.coeffs, spec.intercept, &w_by_n, k, i, theta, false)?;
        Ok((head, cert))
    })?;
    Ok(constants.finish(k, i_max, head, i_cert, 0.0))
}
