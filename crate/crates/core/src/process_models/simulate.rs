//! Reproducible path simulation.
//!
//! Replicate r draws its innovations from a ChaCha8 stream seeded with
//!
//! ```text
//! z = (master_seed XOR r) + 0x9E3779B97F4A7C15
//! z = (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z XOR (z >> 27)) * 0x94D049BB133111EB
//! seed_r = z XOR (z >> 31)
//! ```
//!
//! (wrapping 64-bit arithmetic, the SplitMix64 output step). Each time step
//! consumes exactly one uniform variate, mapped through the inverse CDF.

use super::innovation::InnovationModel;
use super::spec::{ArchInfSpec, TvArchSpec};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::ops::Range;

const SPLITMIX_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const SPLITMIX_MUL1: u64 = 0xBF58_476D_1CE4_E5B9;
const SPLITMIX_MUL2: u64 = 0x94D0_49BB_1331_11EB;

/// Stream seed of replicate `r`.
pub fn replicate_seed(master_seed: u64, r: u64) -> u64 {
    let mut z = (master_seed ^ r).wrapping_add(SPLITMIX_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(SPLITMIX_MUL1);
    z = (z ^ (z >> 27)).wrapping_mul(SPLITMIX_MUL2);
    z ^ (z >> 31)
}

pub fn replicate_rng(master_seed: u64, r: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(replicate_seed(master_seed, r))
}

/// Simulated paths with their seed provenance. `paths[r][i]` is X at time
/// `t_start + i` in replicate r; burn-in values are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub spec_id: String,
    pub innovation: String,
    pub master_seed: u64,
    pub replicate_count: usize,
    pub t_start: i64,
    pub burn_in: usize,
    pub truncation_lag: Option<usize>,
    pub paths: Vec<Vec<f64>>,
}

impl PathEnsemble {
    pub fn path_len(&self) -> usize {
        self.paths.first().map_or(0, Vec::len)
    }

    pub fn times(&self) -> Range<i64> {
        self.t_start..self.t_start + self.path_len() as i64
    }

    pub fn value(&self, r: usize, t: i64) -> f64 {
        self.paths[r][(t - self.t_start) as usize]
    }

    /// Builds an ensemble from externally generated paths (all of equal length).
    pub fn from_paths(spec_id: &str, t_start: i64, paths: Vec<Vec<f64>>) -> Result<Self> {
        if paths.is_empty() || paths.iter().any(|p| p.len() != paths[0].len()) {
            return Err(Error::validation("paths", "need at least one path, all of equal length"));
        }
        Ok(PathEnsemble {
            spec_id: spec_id.to_string(),
            innovation: "external".to_string(),
            master_seed: 0,
            replicate_count: paths.len(),
            t_start,
            burn_in: 0,
            truncation_lag: None,
            paths,
        })
    }
}

fn default_burn_in(lag: usize) -> usize {
    10 * lag.max(50)
}

/// Runs X_t = z_t (a_0(t) + Σ a_j(t) X_{t-j}) forward from explicit
/// innovations. `past` is (X_{t0}, X_{t0-1}, …, X_{t0-p+1}); the result holds
/// X_{t0+1}, …, X_{t0+z.len()}.
pub fn tvarch_path_from_innovations(spec: &TvArchSpec, t0: i64, past: &[f64], z: &[f64]) -> Result<Vec<f64>> {
    let p = spec.order();
    if past.len() != p {
        return Err(Error::validation("x", format!("past block needs length p = {p}, got {}", past.len())));
    }
    let mut buf: Vec<f64> = past.iter().rev().copied().collect();
    buf.reserve(z.len());
    for (i, &zt) in z.iter().enumerate() {
        let t = t0 + 1 + i as i64;
        let x = tvarch_step(spec, t, &buf, zt);
        buf.push(x);
    }
    Ok(buf.split_off(p))
}

#[inline]
fn tvarch_step(spec: &TvArchSpec, t: i64, buf: &[f64], z: f64) -> f64 {
    let n = buf.len();
    let mut acc = spec.a0(t);
    for j in 1..=spec.order() {
        acc += spec.a(j, t) * buf[n - j];
    }
    z * acc
}

#[inline]
fn archinf_step(a0: f64, coeffs: &[f64], buf: &[f64], z: f64) -> f64 {
    let n = buf.len();
    let mut acc = a0;
    for j in 1..coeffs.len() {
        acc += coeffs[j] * buf[n - j];
    }
    z * acc
}

/// Simulates tvARCH(p) paths on `t_range`, preceded by `burn_in` discarded
/// steps (default 10·max(p, 50)) and p pre-sample values at the mean fixed
/// point a_0(t)/(1 − Σ a_j(t)) of the earliest time.
pub fn simulate_tvarch(
    spec: &TvArchSpec,
    innovation: &InnovationModel,
    t_range: Range<i64>,
    replicates: usize,
    master_seed: u64,
    burn_in: Option<usize>,
) -> Result<PathEnsemble> {
    if t_range.is_empty() {
        return Err(Error::validation("t_range", "must be nonempty"));
    }
    if replicates == 0 {
        return Err(Error::validation("replicates", "must be positive"));
    }
    let p = spec.order();
    let burn = burn_in.unwrap_or_else(|| default_burn_in(p));
    let earliest = t_range.start - burn as i64;
    let full = earliest - p as i64..t_range.end;
    spec.validate(full.clone())?;
    let ranges = spec.ranges(full);
    if ranges.sup_sum > 1.0 - spec.delta {
        return Err(Error::AssumptionViolated {
            clause: "coefficient_sum".into(),
            detail: format!(
                "sum of coefficients {} exceeds 1 - delta = {} at t={}",
                ranges.sup_sum,
                1.0 - spec.delta,
                ranges.t_sup_sum
            ),
        });
    }
    let init = spec.a0(earliest) / (1.0 - spec.coeff_sum(earliest));
    let n_out = (t_range.end - t_range.start) as usize;
    let law = innovation.law;
    let paths: Result<Vec<Vec<f64>>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(master_seed, r as u64);
            let mut buf = vec![init; p];
            buf.reserve(burn + n_out);
            for i in 0..burn + n_out {
                let t = earliest + i as i64;
                let z = law.quantile(rng.random::<f64>());
                let x = tvarch_step(spec, t, &buf, z);
                if !x.is_finite() {
                    return Err(Error::SimulationDiverged { t, replicate: r });
                }
                buf.push(x);
            }
            Ok(buf.split_off(p + burn))
        })
        .collect();
    Ok(PathEnsemble {
        spec_id: format!("tvarch(p={p})"),
        innovation: innovation.name(),
        master_seed,
        replicate_count: replicates,
        t_start: t_range.start,
        burn_in: burn,
        truncation_lag: None,
        paths: paths?,
    })
}

/// Largest lag × steps × replicates product an ARCH(∞) simulation may take.
pub const SIM_WORK_LIMIT: u128 = 1 << 36;

/// Truncation and burn-in controls for ARCH(∞) simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArchInfSimOptions {
    /// Discarded steps; default 10·max(L, 50), at least 5·L is enforced.
    pub burn_in: Option<usize>,
    /// Fixed truncation lag L; chosen from `tail_tol` when absent.
    pub truncation_lag: Option<usize>,
    /// Neglected coefficient mass Σ_{j>L} a_j allowed, relative to 1 − Σ a_j.
    pub tail_tol: f64,
}

impl Default for ArchInfSimOptions {
    fn default() -> Self {
        ArchInfSimOptions {
            burn_in: None,
            truncation_lag: None,
            tail_tol: 1e-8,
        }
    }
}

/// Simulates n values of a truncated ARCH(∞) path per replicate at times
/// 0..n.
pub fn simulate_archinf(
    spec: &ArchInfSpec,
    innovation: &InnovationModel,
    n: usize,
    replicates: usize,
    master_seed: u64,
    options: ArchInfSimOptions,
) -> Result<PathEnsemble> {
    spec.validate()?;
    if n == 0 || replicates == 0 {
        return Err(Error::validation("n", "path length and replicate count must be positive"));
    }
    let total = spec.coeffs.total();
    if total >= 1.0 - spec.delta {
        return Err(Error::AssumptionViolated {
            clause: "coefficient_sum".into(),
            detail: format!("sum of coefficients {total} is not below 1 - delta = {}", 1.0 - spec.delta),
        });
    }
    if !(options.tail_tol > 0.0) {
        return Err(Error::validation("tail_tol", "must be positive"));
    }
    let tol = options.tail_tol * (1.0 - total);
    let lag = match options.truncation_lag {
        Some(l) => {
            if spec.coeffs.tail_sum(l + 1) >= tol {
                return Err(Error::Truncation {
                    required: spec.coeffs.truncation_lag(tol)?,
                    limit: l,
                });
            }
            l
        }
        None => spec.coeffs.truncation_lag(tol)?,
    };
    let burn = options.burn_in.unwrap_or_else(|| default_burn_in(lag));
    if burn < 5 * lag {
        return Err(Error::validation(
            "burn_in",
            format!("must be at least 5 x truncation lag = {}, got {burn}", 5 * lag),
        ));
    }
    let work = (lag as u128) * ((burn + n) as u128) * (replicates as u128);
    if work > SIM_WORK_LIMIT {
        return Err(Error::Validation {
            field: "tail_tol".into(),
            reason: format!(
                "truncation lag {lag} needs {work} multiply-adds (limit {SIM_WORK_LIMIT}); raise tail_tol or fix truncation_lag"
            ),
        });
    }
    let coeffs = spec.coeffs.prefix(lag);
    let init = spec.intercept / (1.0 - total);
    let law = innovation.law;
    let a0 = spec.intercept;
    let paths: Result<Vec<Vec<f64>>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(master_seed, r as u64);
            let mut buf = vec![init; lag];
            buf.reserve(burn + n);
            for i in 0..burn + n {
                let z = law.quantile(rng.random::<f64>());
                let x = archinf_step(a0, &coeffs, &buf, z);
                if !x.is_finite() {
                    return Err(Error::SimulationDiverged {
                        t: i as i64 - burn as i64,
                        replicate: r,
                    });
                }
                buf.push(x);
            }
            Ok(buf.split_off(lag + burn))
        })
        .collect();
    Ok(PathEnsemble {
        spec_id: format!("archinf(L={lag})"),
        innovation: innovation.name(),
        master_seed,
        replicate_count: replicates,
        t_start: 0,
        burn_in: burn,
        truncation_lag: Some(lag),
        paths: paths?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process_models::{Coefficients, InnovationLaw};

    fn exp_model() -> InnovationModel {
        InnovationModel {
            law: InnovationLaw::Exponential,
            lipschitz_iii: 1.0,
            lipschitz_iv: 1.0,
        }
    }

    #[test]
    fn forced_unit_innovations() {
        let spec = TvArchSpec::constant(0.1, &[0.5], 0.5);
        let x = tvarch_path_from_innovations(&spec, 0, &[2.0], &[1.0, 1.0]).unwrap();
        assert!((x[0] - 1.1).abs() < 1e-15);
        assert!((x[1] - 0.65).abs() < 1e-15);
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        assert_ne!(replicate_seed(7, 0), replicate_seed(7, 1));
        assert_eq!(replicate_seed(7, 3), replicate_seed(7, 3));
        assert_ne!(replicate_seed(0, 0), 0);
    }

    #[test]
    fn deterministic_rerun() {
        let spec = TvArchSpec::constant(0.1, &[0.3, 0.2], 0.4);
        let a = simulate_tvarch(&spec, &exp_model(), 0..500, 2, 42, None).unwrap();
        let b = simulate_tvarch(&spec, &exp_model(), 0..500, 2, 42, None).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.paths[0], a.paths[1]);
        assert!(a.paths.iter().flatten().all(|&x| x >= 0.0));
    }

    #[test]
    fn arch1_equivalence_is_bitwise() {
        let tv = TvArchSpec::constant(0.1, &[0.5], 0.5);
        let inf = ArchInfSpec::new(0.1, Coefficients::explicit(vec![0.5]), 0.4, 1.0);
        let a = simulate_tvarch(&tv, &exp_model(), 0..2000, 3, 9, None).unwrap();
        let b = simulate_archinf(&inf, &exp_model(), 2000, 3, 9, ArchInfSimOptions::default()).unwrap();
        assert_eq!(a.paths, b.paths);
    }

    #[test]
    fn archinf_burn_in_floor() {
        let inf = ArchInfSpec::new(1.0, Coefficients::Geometric { scale: 0.5, ratio: 0.5 }, 0.4, 1.0);
        let opts = ArchInfSimOptions {
            burn_in: Some(10),
            ..Default::default()
        };
        assert!(matches!(
            simulate_archinf(&inf, &exp_model(), 10, 1, 0, opts),
            Err(Error::Validation { .. })
        ));
    }

    #[test]
    fn heavy_tail_simulation_is_refused_before_running() {
        let spec = ArchInfSpec {
            intercept: 0.1,
            coeffs: Coefficients::power_with_sum(0.5, 2.0),
            delta: 0.4,
            nu: 1.0,
            moment_bound: None,
        };
        let err = simulate_archinf(&spec, &exp_model(), 1000, 16, 1, ArchInfSimOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "tail_tol"), "{err}");
    }

    #[test]
    fn fixed_truncation_too_short_is_refused() {
        let inf = ArchInfSpec::new(1.0, Coefficients::power_with_sum(0.5, 2.0), 0.4, 1.0);
        let opts = ArchInfSimOptions {
            truncation_lag: Some(10),
            tail_tol: 1e-4,
            burn_in: Some(1000),
        };
        match simulate_archinf(&inf, &exp_model(), 10, 1, 0, opts) {
            Err(Error::Truncation { required, .. }) => assert!(required > 10),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn divergence_reports_time() {
        // a huge intercept overflows immediately
        let spec = TvArchSpec::constant(1e308, &[0.5], 0.5);
        match simulate_tvarch(&spec, &exp_model(), 0..10, 1, 1, Some(0)) {
            Err(Error::SimulationDiverged { replicate, .. }) => assert_eq!(replicate, 0),
            other => panic!("{other:?}"),
        }
    }
}
