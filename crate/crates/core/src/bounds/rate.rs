//! Symbolic decay classes of the ARCH(∞) bounds.
//!
//! ```text
//! polynomial a_j ~ j^{−δ}: α/β  k(k+1)^{−δ̃+3} + (k+1)^{−δ̃+2}
//!                          2-mix k(k+1)^{−δ̃+1},       δ̃ = δν/(ν+1)
//! geometric  a_j ~ δ^j:    C k δ^{k/2}
//! ```
//! For geometric coefficients the inverse series ψ decays like ρ^{−j} with
//! A(ρ) = 1, so the effective ratio is max(δ, 1/ρ).

use crate::error::{Error, Result};
use crate::process_models::{ArchInfSpec, TailClass};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum RateClass {
    Polynomial { delta: f64, nu: f64, delta_tilde: f64 },
    Geometric { ratio: f64, delta_eff: f64 },
}

impl RateClass {
    /// Class shape of the α/β bound at lag k (unit constant).
    pub fn alpha_beta(&self, k: usize) -> f64 {
        let kf = k as f64;
        match *self {
            RateClass::Polynomial { delta_tilde, .. } => {
                kf * (kf + 1.0).powf(-delta_tilde + 3.0) + (kf + 1.0).powf(-delta_tilde + 2.0)
            }
            RateClass::Geometric { delta_eff, .. } => kf * delta_eff.powf(kf / 2.0),
        }
    }

    /// Class shape of the 2-mixing bound at lag k (unit constant).
    pub fn two_mix(&self, k: usize) -> f64 {
        let kf = k as f64;
        match *self {
            RateClass::Polynomial { delta_tilde, .. } => kf * (kf + 1.0).powf(-delta_tilde + 1.0),
            RateClass::Geometric { delta_eff, .. } => kf * delta_eff.powf(kf / 2.0),
        }
    }

    /// Asymptotic log-log slope (polynomial) or per-lag ratio (geometric) of
    /// the α/β class.
    pub fn label(&self) -> RateLabel {
        match *self {
            RateClass::Polynomial { delta_tilde, .. } => RateLabel::Polynomial {
                exponent: 4.0 - delta_tilde,
            },
            RateClass::Geometric { delta_eff, .. } => RateLabel::Geometric {
                ratio: delta_eff.sqrt(),
            },
        }
    }
}

/// Decay label attached to a bound curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum RateLabel {
    Geometric { ratio: f64 },
    Polynomial { exponent: f64 },
}

impl std::fmt::Display for RateLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateLabel::Geometric { ratio } => write!(f, "geometric({ratio:.6})"),
            RateLabel::Polynomial { exponent } => write!(f, "polynomial({exponent:.6})"),
        }
    }
}

pub fn rate_classifier(spec: &ArchInfSpec) -> Result<RateClass> {
    spec.validate()?;
    let nu = spec.nu;
    match spec.coeffs.tail_class() {
        None => Err(Error::validation("tail", "a declared tail class is required")),
        Some(TailClass::Polynomial(delta)) => Ok(RateClass::Polynomial {
            delta,
            nu,
            delta_tilde: delta * nu / (nu + 1.0),
        }),
        Some(TailClass::Geometric(ratio)) => {
            let inv = spec.coeffs.inversion_radius().map(|rho| 1.0 / rho).unwrap_or(0.0);
            Ok(RateClass::Geometric {
                ratio,
                delta_eff: ratio.max(inv),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process_models::Coefficients;

    #[test]
    fn polynomial_substitution() {
        let spec = ArchInfSpec::new(1.0, Coefficients::power_with_sum(0.5, 2.5), 0.4, 4.0);
        let c = rate_classifier(&spec).unwrap();
        let RateClass::Polynomial { delta_tilde, .. } = c else { panic!() };
        assert!((delta_tilde - 2.0).abs() < 1e-15);
        assert!((c.two_mix(9) - 9.0 / 10.0).abs() < 1e-15);
    }

    #[test]
    fn geometric_class() {
        let spec = ArchInfSpec::new(1.0, Coefficients::Geometric { scale: 0.1, ratio: 0.5 }, 0.4, 1.0);
        let c = rate_classifier(&spec).unwrap();
        let RateClass::Geometric { ratio, delta_eff } = c else { panic!() };
        assert_eq!(ratio, 0.5);
        // 1 − A(z) = (1 − 0.55 z)/(1 − 0.5 z)
        assert!((delta_eff - 0.55).abs() < 1e-12);
        assert!((c.alpha_beta(4) - 4.0 * 0.55f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn missing_tail_is_error() {
        let spec = ArchInfSpec::new(1.0, Coefficients::explicit(vec![0.3]), 0.4, 1.0);
        assert!(rate_classifier(&spec).is_err());
    }
}
