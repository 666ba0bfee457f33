//! Process specifications, innovation laws, assumption checks and
//! simulation for tvARCH(p) and ARCH(∞).

mod coefficients;
mod companion;
mod innovation;
mod schedule;
mod simulate;
mod spec;

pub use coefficients::{Coefficients, Majorant, MajorantKind, TailClass};
pub use companion::{companion_apply, companion_matrices, mean_companion, Companion, Matrix};
pub use innovation::{InnovationLaw, InnovationModel};
pub use schedule::Schedule;
pub use simulate::{
    replicate_rng, replicate_seed, simulate_archinf, simulate_tvarch, tvarch_path_from_innovations,
    ArchInfSimOptions, PathEnsemble, SIM_WORK_LIMIT,
};
pub use spec::{ArchInfSpec, CoeffRule, CoeffsField, ProcessSpec, ScheduleRanges, SpecFile, TvArchSpec};

use crate::error::{Error, Result};
use std::ops::Range;

/// Assumption clauses checked by [`check_assumptions`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// sup_t Σ a_j(t) ≤ 1 − δ (tvARCH) or Σ a_j < 1 − δ (ARCH(∞)).
    CoefficientSum,
    /// 0 < inf a_0(t) ≤ sup a_0(t) < ∞.
    InterceptRange,
    /// Finite K with ∫|f(u) − f(u(1+a))| du ≤ K a.
    DensityLipschitz,
    /// Finite K with ∫ sup_{τ≤a} |f(u) − f(u(1+τ))| du ≤ K a.
    DensitySupLipschitz,
    /// ν > 1 and (E Z^ν)^{1/ν} Σ a_j < 1.
    MomentCondition,
}

impl Clause {
    pub fn name(&self) -> &'static str {
        match self {
            Clause::CoefficientSum => "coefficient_sum",
            Clause::InterceptRange => "intercept_range",
            Clause::DensityLipschitz => "density_lipschitz",
            Clause::DensitySupLipschitz => "density_sup_lipschitz",
            Clause::MomentCondition => "moment_condition",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClauseResult {
    pub clause: Clause,
    pub passed: bool,
    /// The checked quantity (e.g. the largest coefficient sum).
    pub value: f64,
    /// The threshold it is compared with.
    pub threshold: f64,
    /// Time at which `value` is attained, for tvARCH clauses.
    pub witness_t: Option<i64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub clauses: Vec<ClauseResult>,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn get(&self, clause: Clause) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.clause == clause)
    }
}

fn lipschitz_clauses(innovation: &InnovationModel) -> [ClauseResult; 2] {
    [
        ClauseResult {
            clause: Clause::DensityLipschitz,
            passed: innovation.lipschitz_iii.is_finite(),
            value: innovation.lipschitz_iii,
            threshold: f64::INFINITY,
            witness_t: None,
        },
        ClauseResult {
            clause: Clause::DensitySupLipschitz,
            passed: innovation.lipschitz_iv.is_finite(),
            value: innovation.lipschitz_iv,
            threshold: f64::INFINITY,
            witness_t: None,
        },
    ]
}

/// Checks the standing assumptions. tvARCH clauses are evaluated over
/// `t_range`; ARCH(∞) ignores it.
pub fn check_assumptions(
    spec: &ProcessSpec,
    innovation: &InnovationModel,
    t_range: Range<i64>,
) -> Result<AssumptionReport> {
    let mut clauses = Vec::new();
    match spec {
        ProcessSpec::TvArch(s) => {
            if t_range.is_empty() {
                return Err(Error::validation("t_range", "must be nonempty"));
            }
            s.validate(t_range.clone())?;
            let r = s.ranges(t_range);
            clauses.push(ClauseResult {
                clause: Clause::CoefficientSum,
                passed: r.sup_sum <= 1.0 - s.delta,
                value: r.sup_sum,
                threshold: 1.0 - s.delta,
                witness_t: Some(r.t_sup_sum),
            });
            clauses.push(ClauseResult {
                clause: Clause::InterceptRange,
                passed: r.inf_a0 > 0.0 && r.sup_a0.is_finite(),
                value: r.inf_a0,
                threshold: 0.0,
                witness_t: Some(r.t_inf_a0),
            });
            clauses.extend(lipschitz_clauses(innovation));
        }
        ProcessSpec::ArchInf(s) => {
            s.validate()?;
            let total = s.coeffs.total();
            clauses.push(ClauseResult {
                clause: Clause::CoefficientSum,
                passed: total < 1.0 - s.delta,
                value: total,
                threshold: 1.0 - s.delta,
                witness_t: None,
            });
            clauses.extend(lipschitz_clauses(innovation));
            let factor = innovation.abs_moment(s.nu).powf(1.0 / s.nu) * total;
            clauses.push(ClauseResult {
                clause: Clause::MomentCondition,
                passed: s.nu > 1.0 && factor < 1.0,
                value: factor,
                threshold: 1.0,
                witness_t: None,
            });
        }
    }
    Ok(AssumptionReport { clauses })
}

/// Bound on E X_t: sup a_0(t) / (1 − sup Σ a_j(t)) over `t_range` for
/// tvARCH, a_0 / (1 − Σ a_j) for ARCH(∞).
pub fn stationary_mean_bound(spec: &ProcessSpec, t_range: Range<i64>) -> Result<f64> {
    let (num, sum) = match spec {
        ProcessSpec::TvArch(s) => {
            if t_range.is_empty() {
                return Err(Error::validation("t_range", "must be nonempty"));
            }
            s.validate(t_range.clone())?;
            let r = s.ranges(t_range);
            (r.sup_a0, r.sup_sum)
        }
        ProcessSpec::ArchInf(s) => {
            s.validate()?;
            (s.intercept, s.coeffs.total())
        }
    };
    if sum >= 1.0 {
        return Err(Error::AssumptionViolated {
            clause: Clause::CoefficientSum.name().into(),
            detail: format!("coefficient sum {sum} leaves no positive denominator"),
        });
    }
    Ok(num / (1.0 - sum))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(law: InnovationLaw) -> InnovationModel {
        InnovationModel {
            law,
            lipschitz_iii: 1.0,
            lipschitz_iv: 1.0,
        }
    }

    #[test]
    fn tvarch_arch1_passes() {
        let spec = ProcessSpec::TvArch(TvArchSpec::constant(0.1, &[0.5], 0.5));
        let rep = check_assumptions(&spec, &model(InnovationLaw::Exponential), 0..100).unwrap();
        assert!(rep.all_passed());
    }

    #[test]
    fn archinf_geometric_sum_clause() {
        let c = Coefficients::Geometric { scale: 0.6, ratio: 0.5 };
        let ok = ProcessSpec::ArchInf(ArchInfSpec::new(1.0, c.clone(), 0.3, 2.0));
        let bad = ProcessSpec::ArchInf(ArchInfSpec::new(1.0, c, 0.5, 2.0));
        let m = model(InnovationLaw::Uniform);
        assert!(check_assumptions(&ok, &m, 0..1).unwrap().get(Clause::CoefficientSum).unwrap().passed);
        assert!(!check_assumptions(&bad, &m, 0..1).unwrap().get(Clause::CoefficientSum).unwrap().passed);
    }

    #[test]
    fn moment_clause_exponential_arch1() {
        let spec = ProcessSpec::ArchInf(ArchInfSpec::new(1.0, Coefficients::explicit(vec![0.5]), 0.4, 2.0));
        let rep = check_assumptions(&spec, &model(InnovationLaw::Exponential), 0..1).unwrap();
        let c = rep.get(Clause::MomentCondition).unwrap();
        assert!(c.passed);
        assert!((c.value - 2f64.sqrt() * 0.5).abs() < 1e-12);
    }

    #[test]
    fn witness_points_at_violation() {
        let spec = TvArchSpec {
            intercept: Schedule::Constant(0.1),
            coeffs: vec![Schedule::Piecewise {
                breaks: vec![0, 50],
                values: vec![0.4, 0.7],
            }],
            delta: 0.5,
        };
        let rep = check_assumptions(&ProcessSpec::TvArch(spec), &model(InnovationLaw::Exponential), 0..60).unwrap();
        let c = rep.get(Clause::CoefficientSum).unwrap();
        assert!(!c.passed);
        assert_eq!(c.witness_t, Some(50));
    }

    #[test]
    fn mean_bounds() {
        let tv = ProcessSpec::TvArch(TvArchSpec::constant(0.1, &[0.5], 0.5));
        assert!((stationary_mean_bound(&tv, 0..10).unwrap() - 0.2).abs() < 1e-15);
        let inf = ProcessSpec::ArchInf(ArchInfSpec::new(1.0, Coefficients::power_with_sum(0.5, 2.0), 0.4, 1.0));
        assert!((stationary_mean_bound(&inf, 0..1).unwrap() - 2.0).abs() < 1e-13);
        let varying = ProcessSpec::TvArch(TvArchSpec {
            intercept: Schedule::Piecewise {
                breaks: vec![0, 5],
                values: vec![0.1, 0.3],
            },
            coeffs: vec![Schedule::Piecewise {
                breaks: vec![0, 3],
                values: vec![0.4, 0.5],
            }],
            delta: 0.5,
        });
        assert!((stationary_mean_bound(&varying, 0..10).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn invalid_fields_are_errors() {
        let spec = ProcessSpec::TvArch(TvArchSpec::constant(0.0, &[0.5], 0.5));
        assert!(matches!(
            check_assumptions(&spec, &model(InnovationLaw::Exponential), 0..5),
            Err(Error::Validation { .. })
        ));
    }
}
