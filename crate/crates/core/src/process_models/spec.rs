//! Process specifications and their JSON file format.

use super::coefficients::{Coefficients, TailClass};
use super::schedule::Schedule;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// tvARCH(p): X_t = Z_t (a_0(t) + Σ_{j=1}^p a_j(t) X_{t-j}).
#[derive(Debug, Clone, PartialEq)]
pub struct TvArchSpec {
    pub intercept: Schedule,
    /// Schedules for a_1 … a_p.
    pub coeffs: Vec<Schedule>,
    pub delta: f64,
}

/// ARCH(∞): X_t = Z_t (a_0 + Σ_{j≥1} a_j X_{t-j}).
#[derive(Debug, Clone, PartialEq)]
pub struct ArchInfSpec {
    pub intercept: f64,
    pub coeffs: Coefficients,
    pub delta: f64,
    /// Moment order ν used by the bounds.
    pub nu: f64,
    /// Optional user-supplied bound on E|X_0|^ν.
    pub moment_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProcessSpec {
    TvArch(TvArchSpec),
    ArchInf(ArchInfSpec),
}

impl TvArchSpec {
    /// Time-invariant tvARCH(p).
    pub fn constant(a0: f64, coeffs: &[f64], delta: f64) -> Self {
        TvArchSpec {
            intercept: Schedule::Constant(a0),
            coeffs: coeffs.iter().map(|&c| Schedule::Constant(c)).collect(),
            delta,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn a0(&self, t: i64) -> f64 {
        self.intercept.value(t)
    }

    /// a_j(t) for 1 ≤ j ≤ p, zero otherwise.
    pub fn a(&self, j: usize, t: i64) -> f64 {
        if j == 0 || j > self.coeffs.len() {
            0.0
        } else {
            self.coeffs[j - 1].value(t)
        }
    }

    pub fn coeff_sum(&self, t: i64) -> f64 {
        self.coeffs.iter().map(|c| c.value(t)).sum()
    }

    /// Checks shapes, δ and pointwise positivity over `range`.
    pub fn validate(&self, range: Range<i64>) -> Result<()> {
        if self.coeffs.is_empty() {
            return Err(Error::validation("p", "order must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::validation("delta", format!("must lie in (0,1), got {}", self.delta)));
        }
        self.intercept.validate_shape("a0")?;
        for (j, c) in self.coeffs.iter().enumerate() {
            c.validate_shape(&format!("coeffs[{}]", j + 1))?;
        }
        for t in range {
            let a0 = self.a0(t);
            if !(a0.is_finite() && a0 > 0.0) {
                return Err(Error::validation("a0", format!("must be positive, got {a0} at t={t}")));
            }
            for j in 1..=self.order() {
                let v = self.a(j, t);
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::validation(
                        format!("coeffs[{j}]"),
                        format!("must be nonnegative, got {v} at t={t}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// (inf a_0, sup a_0, sup Σ a_j) over `range`, with the maximising times.
    pub fn ranges(&self, range: Range<i64>) -> ScheduleRanges {
        let mut r = ScheduleRanges {
            inf_a0: f64::INFINITY,
            sup_a0: f64::NEG_INFINITY,
            sup_sum: f64::NEG_INFINITY,
            t_inf_a0: range.start,
            t_sup_sum: range.start,
        };
        for t in range {
            let a0 = self.a0(t);
            if a0 < r.inf_a0 {
                r.inf_a0 = a0;
                r.t_inf_a0 = t;
            }
            r.sup_a0 = r.sup_a0.max(a0);
            let s = self.coeff_sum(t);
            if s > r.sup_sum {
                r.sup_sum = s;
                r.t_sup_sum = t;
            }
        }
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleRanges {
    pub inf_a0: f64,
    pub sup_a0: f64,
    pub sup_sum: f64,
    pub t_inf_a0: i64,
    pub t_sup_sum: i64,
}

impl ArchInfSpec {
    pub fn new(intercept: f64, coeffs: Coefficients, delta: f64, nu: f64) -> Self {
        ArchInfSpec {
            intercept,
            coeffs,
            delta,
            nu,
            moment_bound: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.intercept.is_finite() && self.intercept > 0.0) {
            return Err(Error::validation("a0", format!("must be positive, got {}", self.intercept)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::validation("delta", format!("must lie in (0,1), got {}", self.delta)));
        }
        if !(self.nu >= 1.0 && self.nu.is_finite()) {
            return Err(Error::validation("nu", format!("must be at least 1, got {}", self.nu)));
        }
        if let Some(m) = self.moment_bound {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::validation("moment_bound", format!("must be positive, got {m}")));
            }
        }
        self.coeffs.validate()
    }
}

impl ProcessSpec {
    pub fn delta(&self) -> f64 {
        match self {
            ProcessSpec::TvArch(s) => s.delta,
            ProcessSpec::ArchInf(s) => s.delta,
        }
    }

    /// Short human-readable identifier.
    pub fn id(&self) -> String {
        match self {
            ProcessSpec::TvArch(s) => format!("tvarch(p={})", s.order()),
            ProcessSpec::ArchInf(s) => match &s.coeffs {
                Coefficients::Explicit { values, tail } => match tail {
                    None => format!("archinf(explicit,L={})", values.len()),
                    Some(TailClass::Geometric(r)) => format!("archinf(explicit,L={},geometric {r})", values.len()),
                    Some(TailClass::Polynomial(a)) => format!("archinf(explicit,L={},polynomial {a})", values.len()),
                },
                Coefficients::Power { exponent, .. } => format!("archinf(power {exponent})"),
                Coefficients::Geometric { ratio, .. } => format!("archinf(geometric {ratio})"),
            },
        }
    }
}

/// JSON form of a spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    pub a0: Schedule,
    pub coeffs: CoeffsField,
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub innovation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moment_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffsField {
    List(Vec<Schedule>),
    Rule(CoeffRule),
}

/// Closed-form ARCH(∞) coefficient rule. Give either `scale` or `sum`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffRule {
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Converts to a validated domain spec. tvARCH schedules are validated
    /// later, on the time range actually queried.
    pub fn to_spec(&self) -> Result<ProcessSpec> {
        match self.kind.as_str() {
            "tvarch" => {
                let coeffs = match &self.coeffs {
                    CoeffsField::List(v) => v.clone(),
                    CoeffsField::Rule(_) => {
                        return Err(Error::validation("coeffs", "tvarch needs a list of coefficient schedules"))
                    }
                };
                if let Some(p) = self.p {
                    if p != coeffs.len() {
                        return Err(Error::validation(
                            "p",
                            format!("p = {p} but {} coefficient schedules given", coeffs.len()),
                        ));
                    }
                }
                if self.tail.is_some() {
                    return Err(Error::validation("tail", "tail classes apply to archinf specs only"));
                }
                let spec = TvArchSpec {
                    intercept: self.a0.clone(),
                    coeffs,
                    delta: self.delta,
                };
                spec.validate(0..1)?;
                Ok(ProcessSpec::TvArch(spec))
            }
            "archinf" => {
                let a0 = match self.a0 {
                    Schedule::Constant(v) => v,
                    _ => return Err(Error::validation("a0", "archinf intercept must be a number")),
                };
                let coeffs = match &self.coeffs {
                    CoeffsField::List(v) => {
                        let mut values = Vec::with_capacity(v.len());
                        for (j, s) in v.iter().enumerate() {
                            match s {
                                Schedule::Constant(c) => values.push(*c),
                                _ => {
                                    return Err(Error::validation(
                                        format!("coeffs[{}]", j + 1),
                                        "archinf coefficients must be numbers",
                                    ))
                                }
                            }
                        }
                        Coefficients::Explicit {
                            values,
                            tail: self.tail,
                        }
                    }
                    CoeffsField::Rule(r) => rule_coefficients(r, self.tail)?,
                };
                let spec = ArchInfSpec {
                    intercept: a0,
                    coeffs,
                    delta: self.delta,
                    nu: self.nu.unwrap_or(1.0),
                    moment_bound: self.moment_bound,
                };
                spec.validate()?;
                Ok(ProcessSpec::ArchInf(spec))
            }
            other => Err(Error::validation(
                "kind",
                format!("expected \"tvarch\" or \"archinf\", got \"{other}\""),
            )),
        }
    }
}

fn rule_coefficients(r: &CoeffRule, tail: Option<TailClass>) -> Result<Coefficients> {
    let scale_for = |unit_sum: f64| -> Result<f64> {
        match (r.scale, r.sum) {
            (Some(s), None) => Ok(s),
            (None, Some(total)) => Ok(total / unit_sum),
            _ => Err(Error::validation("coeffs", "give exactly one of \"scale\" or \"sum\"")),
        }
    };
    let c = match r.rule.as_str() {
        "power" => {
            let exponent = r
                .exponent
                .ok_or_else(|| Error::validation("coeffs.exponent", "power rule needs an exponent"))?;
            if exponent <= 1.0 {
                return Err(Error::validation("coeffs.exponent", format!("must exceed 1, got {exponent}")));
            }
            Coefficients::Power {
                scale: scale_for(crate::special::hurwitz_zeta(exponent, 1.0))?,
                exponent,
            }
        }
        "geometric" => {
            let ratio = r
                .ratio
                .ok_or_else(|| Error::validation("coeffs.ratio", "geometric rule needs a ratio"))?;
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(Error::validation("coeffs.ratio", format!("must lie in (0,1), got {ratio}")));
            }
            Coefficients::Geometric {
                scale: scale_for(ratio / (1.0 - ratio))?,
                ratio,
            }
        }
        other => {
            return Err(Error::validation(
                "coeffs.rule",
                format!("expected \"power\" or \"geometric\", got \"{other}\""),
            ))
        }
    };
    if let Some(t) = tail {
        if Some(t) != c.tail_class() {
            return Err(Error::validation("tail", "declared tail class contradicts the coefficient rule"));
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_tvarch() {
        let f = SpecFile::parse(r#"{"kind":"tvarch","p":1,"a0":0.1,"coeffs":[0.5],"delta":0.5,"innovation":"exponential"}"#)
            .unwrap();
        match f.to_spec().unwrap() {
            ProcessSpec::TvArch(s) => {
                assert_eq!(s.order(), 1);
                assert_eq!(s.a(1, 7), 0.5);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn parse_archinf_rule_with_sum() {
        let f = SpecFile::parse(
            r#"{"kind":"archinf","a0":1,"coeffs":{"rule":"power","exponent":2,"sum":0.5},"delta":0.4,"nu":1}"#,
        )
        .unwrap();
        match f.to_spec().unwrap() {
            ProcessSpec::ArchInf(s) => assert!((s.coeffs.total() - 0.5).abs() < 1e-14),
            _ => panic!(),
        }
    }

    #[test]
    fn parse_archinf_tail() {
        let f = SpecFile::parse(
            r#"{"kind":"archinf","a0":1,"coeffs":[0.2,0.1],"tail":{"class":"geometric","param":0.5},"delta":0.5}"#,
        )
        .unwrap();
        let spec = f.to_spec().unwrap();
        let back = serde_json::to_string(&f).unwrap();
        assert_eq!(SpecFile::parse(&back).unwrap(), f);
        match spec {
            ProcessSpec::ArchInf(s) => assert_eq!(s.coeffs.tail_class(), Some(TailClass::Geometric(0.5))),
            _ => panic!(),
        }
    }

    #[test]
    fn validation_errors_name_fields() {
        let bad_a0 = SpecFile::parse(r#"{"kind":"tvarch","a0":-0.1,"coeffs":[0.5],"delta":0.5}"#).unwrap();
        match bad_a0.to_spec() {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "a0"),
            other => panic!("{other:?}"),
        }
        let bad_c = SpecFile::parse(r#"{"kind":"tvarch","a0":0.1,"coeffs":[0.5,-0.1],"delta":0.5}"#).unwrap();
        match bad_c.to_spec() {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "coeffs[2]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_location() {
        let err = SpecFile::parse("{\"kind\": \"tvarch\",\n \"a0\": }").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
    }
}
