//! Per-lag estimate curves, covariance decay and decay-rate fits.

use super::estimators::estimates_on;
use super::table::{build_table, Anchor, BATCHES};
use crate::error::{Error, Result};
use crate::process_models::{PathEnsemble, ProcessSpec};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig {
    pub anchor: Anchor,
    pub r_left: usize,
    pub r_right: usize,
    pub m: usize,
}

impl EstimateConfig {
    /// tvARCH(p): left window of p values, m = 8. ARCH(∞): left window of
    /// 5 values, m = 4.
    pub fn for_spec(spec: &ProcessSpec) -> Self {
        match spec {
            ProcessSpec::TvArch(s) => EstimateConfig {
                anchor: Anchor::Pooled,
                r_left: s.order().saturating_sub(1),
                r_right: 0,
                m: 8,
            },
            ProcessSpec::ArchInf(_) => EstimateConfig {
                anchor: Anchor::Pooled,
                r_left: 4,
                r_right: 0,
                m: 4,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateCurve {
    pub lags: Vec<usize>,
    pub alpha_hat: Vec<f64>,
    pub beta_hat: Vec<f64>,
    pub twomix_hat: Vec<f64>,
    pub se_alpha: Vec<f64>,
    pub se_beta: Vec<f64>,
    pub se_twomix: Vec<f64>,
    pub m: usize,
    pub r_left: usize,
    pub r_right: usize,
    /// Samples per lag.
    pub n: Vec<u64>,
    /// False where the α̂ search was heuristic.
    pub exact: Vec<bool>,
    pub batches: usize,
}

/// Batch-means standard error sd(x_b)/√B; NaN with fewer than two batches.
pub fn batch_se(values: &[f64]) -> f64 {
    let b = values.len();
    if b < 2 {
        return f64::NAN;
    }
    let mean = values.iter().sum::<f64>() / b as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (b - 1) as f64;
    (var / b as f64).sqrt()
}

struct LagEstimate {
    alpha: f64,
    beta: f64,
    two: f64,
    se: [f64; 3],
    n: u64,
    exact: bool,
}

fn estimate_lag(ensemble: &PathEnsemble, k: usize, config: &EstimateConfig) -> Result<LagEstimate> {
    let table = build_table(ensemble, config.anchor, k, config.r_left, config.r_right, config.m)?;
    let (alpha, (beta, beta_num), two) = estimates_on(&table, &table.matrix());
    if !(two.numerator <= alpha.numerator && alpha.numerator <= beta_num) {
        return Err(Error::InternalConsistency {
            check: format!("estimator ordering at k={k}"),
            rel_err: (two.value - alpha.value).max(alpha.value - beta),
        });
    }
    let mut per = [Vec::new(), Vec::new(), Vec::new()];
    for mat in table.batch_matrices() {
        let (a, (b, _), t) = estimates_on(&table, &mat);
        per[0].push(a.value);
        per[1].push(b);
        per[2].push(t.value);
    }
    Ok(LagEstimate {
        alpha: alpha.value,
        beta,
        two: two.value,
        se: [batch_se(&per[0]), batch_se(&per[1]), batch_se(&per[2])],
        n: table.sample_count,
        exact: alpha.exact,
    })
}

/// α̂, β̂, 2-mix estimates and batch SEs for every lag; the ordering
/// 2-mix ≤ α̂ ≤ β̂ is checked exactly at each lag.
pub fn estimate_curve(ensemble: &PathEnsemble, lags: &[usize], config: &EstimateConfig) -> Result<EstimateCurve> {
    if lags.is_empty() {
        return Err(Error::validation("k", "lag range is empty"));
    }
    let rows: Vec<LagEstimate> = lags
        .par_iter()
        .map(|&k| estimate_lag(ensemble, k, config))
        .collect::<Result<_>>()?;
    Ok(EstimateCurve {
        lags: lags.to_vec(),
        alpha_hat: rows.iter().map(|r| r.alpha).collect(),
        beta_hat: rows.iter().map(|r| r.beta).collect(),
        twomix_hat: rows.iter().map(|r| r.two).collect(),
        se_alpha: rows.iter().map(|r| r.se[0]).collect(),
        se_beta: rows.iter().map(|r| r.se[1]).collect(),
        se_twomix: rows.iter().map(|r| r.se[2]).collect(),
        m: config.m,
        r_left: config.r_left,
        r_right: config.r_right,
        n: rows.iter().map(|r| r.n).collect(),
        exact: rows.iter().map(|r| r.exact).collect(),
        batches: BATCHES,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceCurve {
    pub lags: Vec<usize>,
    pub cov: Vec<f64>,
    pub se: Vec<f64>,
    /// True when pooled over a nonstationary (tvARCH) ensemble, so each
    /// value is a t-average.
    pub time_averaged: bool,
}

/// cov(X_t, X_{t+k}) pooled over t and replicates, centred at the pooled
/// mean, with batch-means SEs over 16 contiguous batches.
pub fn covariance_curve(ensemble: &PathEnsemble, lags: &[usize]) -> Result<CovarianceCurve> {
    let len = ensemble.path_len();
    if let Some(&k) = lags.iter().find(|&&k| k + 1 >= len) {
        return Err(Error::validation("k", format!("lag {k} needs paths longer than {len}")));
    }
    let count = (ensemble.paths.len() * len) as f64;
    let mean = ensemble.paths.iter().flatten().sum::<f64>() / count;
    let rows: Vec<(f64, f64)> = lags
        .par_iter()
        .map(|&k| {
            let per_rep = len - k;
            let n = ensemble.paths.len() * per_rep;
            let product = |pos: usize| {
                let p = &ensemble.paths[pos / per_rep];
                let i = pos % per_rep;
                (p[i] - mean) * (p[i + k] - mean)
            };
            let batch_means: Vec<f64> = (0..BATCHES)
                .map(|b| {
                    let lo = b * n / BATCHES;
                    let hi = (b + 1) * n / BATCHES;
                    (lo..hi).map(product).sum::<f64>() / (hi - lo).max(1) as f64
                })
                .collect();
            let total = (0..BATCHES)
                .map(|b| batch_means[b] * ((b + 1) * n / BATCHES - b * n / BATCHES) as f64)
                .sum::<f64>()
                / n as f64;
            (total, batch_se(&batch_means))
        })
        .collect();
    Ok(CovarianceCurve {
        lags: lags.to_vec(),
        cov: rows.iter().map(|r| r.0).collect(),
        se: rows.iter().map(|r| r.1).collect(),
        time_averaged: ensemble.spec_id.starts_with("tvarch"),
    })
}

/// Least-squares line y = intercept + slope·x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Residual sum of squares.
    pub ssr: f64,
}

fn line_fit(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    LineFit {
        slope,
        intercept,
        r_squared,
        ssr,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum FitClass {
    Geometric { ratio: f64 },
    Polynomial { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    /// The class with the smaller residual.
    pub class: FitClass,
    pub slope: f64,
    pub r_squared: f64,
    /// log v against k.
    pub geometric: LineFit,
    /// log v against log k.
    pub polynomial: LineFit,
}

/// Fits log v against k and against log k over lags in `window`.
pub fn decay_fit(lags: &[usize], values: &[f64], window: std::ops::RangeInclusive<usize>) -> Result<DecayFit> {
    if lags.len() != values.len() {
        return Err(Error::validation("values", "one value per lag required"));
    }
    let mut ks = Vec::new();
    let mut logs = Vec::new();
    for (&k, &v) in lags.iter().zip(values) {
        if window.contains(&k) {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation("values", format!("nonpositive value {v} at k={k}")));
            }
            ks.push(k as f64);
            logs.push(v.ln());
        }
    }
    if ks.len() < 2 {
        return Err(Error::validation("window", "need at least two lags in the fit window"));
    }
    if ks.iter().any(|k| *k <= 0.0) {
        return Err(Error::validation("window", "lags must be positive"));
    }
    let geometric = line_fit(&ks, &logs);
    let log_k: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let polynomial = line_fit(&log_k, &logs);
    let (class, fit) = if geometric.ssr <= polynomial.ssr {
        (
            FitClass::Geometric {
                ratio: geometric.slope.exp(),
            },
            geometric,
        )
    } else {
        (
            FitClass::Polynomial {
                exponent: polynomial.slope,
            },
            polynomial,
        )
    };
    Ok(DecayFit {
        class,
        slope: fit.slope,
        r_squared: fit.r_squared,
        geometric,
        polynomial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_geometric_and_polynomial() {
        let lags: Vec<usize> = (1..=30).collect();
        let geo: Vec<f64> = lags.iter().map(|&k| 3.0 * 0.7f64.powi(k as i32)).collect();
        let f = decay_fit(&lags, &geo, 1..=30).unwrap();
        let FitClass::Geometric { ratio } = f.class else { panic!("{f:?}") };
        assert!((ratio - 0.7).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let poly: Vec<f64> = lags.iter().map(|&k| (k as f64).powi(-2)).collect();
        let f = decay_fit(&lags, &poly, 1..=30).unwrap();
        let FitClass::Polynomial { exponent } = f.class else { panic!("{f:?}") };
        assert!((exponent + 2.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_geometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lags: Vec<usize> = (1..=40).collect();
        let v: Vec<f64> = lags
            .iter()
            .map(|&k| 0.8f64.powi(k as i32) * (1.0 + 0.01 * (rng.random::<f64>() * 2.0 - 1.0) * 3f64.sqrt()))
            .collect();
        let f = decay_fit(&lags, &v, 1..=40).unwrap();
        let FitClass::Geometric { ratio } = f.class else { panic!() };
        assert!((ratio - 0.8).abs() < 0.01);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(decay_fit(&[1, 2, 3], &[1.0, 0.0, 0.5], 1..=3).is_err());
        assert!(decay_fit(&[1, 2], &[1.0, 0.5], 5..=6).is_err());
    }

    #[test]
    fn iid_covariance_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let paths: Vec<Vec<f64>> = (0..4).map(|_| (0..20_000).map(|_| rng.random::<f64>()).collect()).collect();
        let e = PathEnsemble::from_paths("iid", 0, paths).unwrap();
        let c = covariance_curve(&e, &[1, 2, 5]).unwrap();
        for (v, s) in c.cov.iter().zip(&c.se) {
            assert!(v.abs() <= 4.0 * s, "{v} vs {s}");
        }
    }

    #[test]
    fn batch_se_basics() {
        assert!(batch_se(&[1.0]).is_nan());
        assert!((batch_se(&[1.0, 3.0]) - 1.0).abs() < 1e-15);
    }
}
