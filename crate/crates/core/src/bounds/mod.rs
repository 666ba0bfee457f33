//! Theoretical mixing-rate bounds with explicitly assembled constants.

mod archinf;
mod eta;
mod rate;
mod tvarch;

pub use archinf::{
    archinf_alpha_beta_bound, archinf_constants, archinf_two_mix_bound, moment_bound, ArchInfBound,
    ArchInfBoundConfig, ArchInfConstants, MomentSource, I_LIMIT,
};
pub use eta::{
    assemble_envelope, eta_constant, minimize_eta, minimize_eta_numeric, packaged_constant, EnvelopeBound,
    EnvelopeTerm, EtaProblem, EtaSolution, SEARCH_TOL,
};
pub use rate::{rate_classifier, RateClass, RateLabel};
pub use tvarch::{
    optimize_delta_tilde, spectral_product_decay, tvarch_alpha_bound, tvarch_beta_bound, tvarch_bound_with,
    tvarch_constants, tvarch_envelope_assembly, DecayReport, MixingKind, TvArchBound, TvArchConstants,
    SPECTRAL_TOL,
};

use crate::error::{Error, Result};
use crate::process_models::{InnovationModel, ProcessSpec};
use crate::volterra::PsiTable;
use rayon::prelude::*;
use serde::Serialize;
use std::str::FromStr;

/// Which form fills the α/β/2-mix columns: the closed-form envelope
/// (`Packaged`) or the exact-weight infimum (`Tight`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundVariant {
    #[default]
    Packaged,
    Tight,
}

impl FromStr for BoundVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "packaged" => Ok(BoundVariant::Packaged),
            "tight" => Ok(BoundVariant::Tight),
            other => Err(Error::validation("variant", format!("unknown bound variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundOptions {
    pub variant: BoundVariant,
    /// Reference time for tvARCH.
    pub t: i64,
    /// tvARCH δ̃; defaults to 0.9 δ.
    pub delta_tilde: Option<f64>,
    pub archinf: ArchInfBoundConfig,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            variant: BoundVariant::Packaged,
            t: 0,
            delta_tilde: None,
            archinf: ArchInfBoundConfig::default(),
        }
    }
}

/// Per-lag truncation record of an ARCH(∞) bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationRecord {
    pub k: usize,
    pub i_max: usize,
    pub i_tail_certificate: f64,
    pub s_tail_certificate: f64,
    pub twomix_i_max: usize,
    pub twomix_i_tail_certificate: f64,
}

/// Constants behind a bound curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundConstants {
    pub process: String,
    pub innovation: String,
    pub variant: BoundVariant,
    pub k_iii: f64,
    pub k_iv: f64,
    /// K(ν) (ARCH(∞) only).
    pub k_nu: Option<f64>,
    /// δ̃ (tvARCH only).
    pub delta_tilde: Option<f64>,
    /// Bound on E|X|^ν (ν = 1 for tvARCH).
    pub moment_bound: f64,
    pub moment_source: String,
    pub tvarch: Option<TvArchConstants>,
    pub archinf: Option<ArchInfConstants>,
    pub truncation: Vec<TruncationRecord>,
    pub rate_class: Option<RateClass>,
    pub literal_two_mix: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCurve {
    pub lags: Vec<usize>,
    pub alpha_bound: Vec<f64>,
    pub beta_bound: Vec<f64>,
    pub twomix_bound: Vec<f64>,
    /// Exact-weight α bound, whatever the variant.
    pub tight_alpha: Vec<f64>,
    pub constants: BoundConstants,
    pub rate_class: Option<RateLabel>,
    /// First lag from which every column is nonincreasing.
    pub monotone_from: Option<usize>,
}

fn monotone_from(lags: &[usize], cols: &[&[f64]]) -> Option<usize> {
    let n = lags.len();
    if n == 0 {
        return None;
    }
    let mut start = n - 1;
    while start > 0 && cols.iter().all(|c| c[start] <= c[start - 1]) {
        start -= 1;
    }
    Some(lags[start])
}

fn check_lags(lags: &[usize]) -> Result<()> {
    if lags.is_empty() {
        return Err(Error::validation("k", "lag range is empty"));
    }
    if lags.contains(&0) {
        return Err(Error::validation("k", "lags must be at least 1"));
    }
    if lags.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::validation("k", "lags must be strictly increasing"));
    }
    Ok(())
}

/// Evaluates all bounds for every lag in `lags` (strictly increasing, ≥ 1).
pub fn bound_curve(spec: &ProcessSpec, innovation: &InnovationModel, lags: &[usize], options: &BoundOptions) -> Result<BoundCurve> {
    check_lags(lags)?;
    let k_max = *lags.last().expect("nonempty");
    let tight = options.variant == BoundVariant::Tight;
    let curve = match spec {
        ProcessSpec::TvArch(s) => {
            let dt = options.delta_tilde.unwrap_or(0.9 * s.delta);
            let c = tvarch_constants(s, innovation, options.t, k_max, dt)?;
            let rows: Vec<(TvArchBound, TvArchBound)> = lags
                .par_iter()
                .map(|&k| {
                    Ok((
                        tvarch_bound_with(s, &c, k, MixingKind::Alpha)?,
                        tvarch_bound_with(s, &c, k, MixingKind::Beta)?,
                    ))
                })
                .collect::<Result<_>>()?;
            let pick = |b: &TvArchBound| if tight { b.weighted } else { b.geometric };
            let alpha: Vec<f64> = rows.iter().map(|r| pick(&r.0)).collect();
            BoundCurve {
                lags: lags.to_vec(),
                twomix_bound: alpha.clone(),
                alpha_bound: alpha,
                beta_bound: rows.iter().map(|r| pick(&r.1)).collect(),
                tight_alpha: rows.iter().map(|r| r.0.weighted).collect(),
                rate_class: Some(RateLabel::Geometric {
                    ratio: (1.0 - dt).sqrt(),
                }),
                constants: BoundConstants {
                    process: spec.id(),
                    innovation: innovation.name(),
                    variant: options.variant,
                    k_iii: innovation.lipschitz_iii,
                    k_iv: innovation.lipschitz_iv,
                    k_nu: None,
                    delta_tilde: Some(dt),
                    moment_bound: c.mean_bound,
                    moment_source: "stationary_mean".into(),
                    tvarch: Some(c),
                    archinf: None,
                    truncation: Vec::new(),
                    rate_class: None,
                    literal_two_mix: false,
                },
                monotone_from: None,
            }
        }
        ProcessSpec::ArchInf(s) => {
            let c = archinf_constants(s, innovation)?;
            let psi = PsiTable::new(&s.coeffs)?;
            psi.prefix(k_max);
            let rows: Vec<(ArchInfBound, ArchInfBound)> = lags
                .par_iter()
                .map(|&k| {
                    Ok((
                        archinf::alpha_beta_with(s, &c, &psi, k, &options.archinf)?,
                        archinf::two_mix_with(s, &c, &psi, k, &options.archinf)?,
                    ))
                })
                .collect::<Result<_>>()?;
            let pick = |b: &ArchInfBound| if tight { b.tight } else { b.packaged };
            let alpha: Vec<f64> = rows.iter().map(|r| pick(&r.0)).collect();
            let class = rate_classifier(s).ok();
            BoundCurve {
                lags: lags.to_vec(),
                beta_bound: alpha.clone(),
                alpha_bound: alpha,
                twomix_bound: rows.iter().map(|r| pick(&r.1)).collect(),
                tight_alpha: rows.iter().map(|r| r.0.tight).collect(),
                rate_class: class.map(|c| c.label()),
                constants: BoundConstants {
                    process: spec.id(),
                    innovation: innovation.name(),
                    variant: options.variant,
                    k_iii: innovation.lipschitz_iii,
                    k_iv: innovation.lipschitz_iv,
                    k_nu: Some(c.k_nu),
                    delta_tilde: None,
                    moment_bound: c.moment_bound,
                    moment_source: serde_json::to_value(c.moment_source)?
                        .as_str()
                        .unwrap_or_default()
                        .to_string(),
                    truncation: rows
                        .iter()
                        .map(|(a, m)| TruncationRecord {
                            k: a.k,
                            i_max: a.i_max,
                            i_tail_certificate: a.i_tail_certificate,
                            s_tail_certificate: a.s_tail_certificate,
                            twomix_i_max: m.i_max,
                            twomix_i_tail_certificate: m.i_tail_certificate,
                        })
                        .collect(),
                    tvarch: None,
                    archinf: Some(c),
                    rate_class: class,
                    literal_two_mix: options.archinf.literal_two_mix,
                },
                monotone_from: None,
            }
        }
    };
    let monotone = monotone_from(
        &curve.lags,
        &[&curve.alpha_bound, &curve.beta_bound, &curve.twomix_bound, &curve.tight_alpha],
    );
    Ok(BoundCurve {
        monotone_from: monotone,
        ..curve
    })
}
