//! Positive, unit-mean innovation laws Z_t.

use crate::density_analysis::{self, LipschitzCertificate};
use crate::error::{Error, Result};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erf_inv;
use statrs::function::gamma::{gamma_lr, ln_gamma};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

/// The three shipped innovation laws, all with E Z = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InnovationLaw {
    /// Exp(1).
    Exponential,
    /// Uniform on [0, 2].
    Uniform,
    /// χ²_m / m.
    ScaledChiSquare(u32),
}

impl fmt::Display for InnovationLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InnovationLaw::Exponential => write!(f, "exponential"),
            InnovationLaw::Uniform => write!(f, "uniform"),
            InnovationLaw::ScaledChiSquare(m) => write!(f, "chi-square({m})"),
        }
    }
}

impl FromStr for InnovationLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "exponential" | "exp" => return Ok(InnovationLaw::Exponential),
            "uniform" | "uniform[0,2]" => return Ok(InnovationLaw::Uniform),
            "chi-square" | "chisq" | "chi2" => return Ok(InnovationLaw::ScaledChiSquare(1)),
            _ => {}
        }
        for prefix in ["chi-square(", "chisq(", "chi2("] {
            if let Some(rest) = s.strip_prefix(prefix).and_then(|r| r.strip_suffix(')')) {
                let m: u32 = rest
                    .parse()
                    .map_err(|_| Error::validation("innovation", format!("bad degrees of freedom in '{s}'")))?;
                if m == 0 {
                    return Err(Error::validation("innovation", "degrees of freedom must be positive"));
                }
                return Ok(InnovationLaw::ScaledChiSquare(m));
            }
        }
        Err(Error::validation(
            "innovation",
            format!("unknown law '{s}' (expected exponential, uniform or chi-square(m))"),
        ))
    }
}

impl InnovationLaw {
    pub fn pdf(&self, z: f64) -> f64 {
        if z < 0.0 {
            return 0.0;
        }
        match *self {
            InnovationLaw::Exponential => (-z).exp(),
            InnovationLaw::Uniform => {
                if z <= 2.0 {
                    0.5
                } else {
                    0.0
                }
            }
            InnovationLaw::ScaledChiSquare(m) => {
                let m = m as f64;
                let h = 0.5 * m;
                if z == 0.0 {
                    return match h {
                        h if h < 1.0 => f64::INFINITY,
                        h if h == 1.0 => 1.0,
                        _ => 0.0,
                    };
                }
                let x = m * z;
                (m.ln() + (h - 1.0) * x.ln() - 0.5 * x - h * std::f64::consts::LN_2 - ln_gamma(h)).exp()
            }
        }
    }

    pub fn cdf(&self, z: f64) -> f64 {
        if z <= 0.0 {
            return 0.0;
        }
        match *self {
            InnovationLaw::Exponential => -(-z).exp_m1(),
            InnovationLaw::Uniform => (0.5 * z).min(1.0),
            InnovationLaw::ScaledChiSquare(m) => gamma_lr(0.5 * m as f64, 0.5 * m as f64 * z),
        }
    }

    /// Inverse CDF on [0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            InnovationLaw::Exponential => -(-u).ln_1p(),
            InnovationLaw::Uniform => 2.0 * u,
            InnovationLaw::ScaledChiSquare(1) => {
                let g = erf_inv(u);
                2.0 * g * g
            }
            InnovationLaw::ScaledChiSquare(2) => -(-u).ln_1p(),
            InnovationLaw::ScaledChiSquare(m) => {
                let d = ChiSquared::new(m as f64).expect("positive degrees of freedom");
                d.inverse_cdf(u) / m as f64
            }
        }
    }

    pub fn mean(&self) -> f64 {
        1.0
    }

    pub fn second_moment(&self) -> f64 {
        self.abs_moment(2.0)
    }

    /// E Z^ν for ν > 0.
    pub fn abs_moment(&self, nu: f64) -> f64 {
        match *self {
            InnovationLaw::Exponential => ln_gamma(nu + 1.0).exp(),
            InnovationLaw::Uniform => 2f64.powf(nu) / (nu + 1.0),
            InnovationLaw::ScaledChiSquare(m) => {
                let h = 0.5 * m as f64;
                (nu * (2.0 / m as f64).ln() + ln_gamma(h + nu) - ln_gamma(h)).exp()
            }
        }
    }

    /// Right end of the support (infinite for unbounded laws).
    pub fn support_max(&self) -> f64 {
        match self {
            InnovationLaw::Uniform => 2.0,
            _ => f64::INFINITY,
        }
    }

    /// Point beyond which the upper tail mass is below `mass`.
    pub fn upper_cut(&self, mass: f64) -> f64 {
        match *self {
            InnovationLaw::Exponential | InnovationLaw::ScaledChiSquare(2) => -mass.ln(),
            InnovationLaw::Uniform => 2.0,
            InnovationLaw::ScaledChiSquare(_) => {
                let mut z = 1.0;
                while 1.0 - self.cdf(z) > mass {
                    z *= 1.5;
                }
                z
            }
        }
    }

    /// Points where the density is not smooth (besides 0).
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            InnovationLaw::Uniform => vec![2.0],
            InnovationLaw::ScaledChiSquare(m) if *m > 2 => vec![self.mode()],
            _ => vec![],
        }
    }

    /// Whether the density is unbounded at 0.
    pub fn singular_at_zero(&self) -> bool {
        matches!(self, InnovationLaw::ScaledChiSquare(1))
    }

    /// Location of the density maximum.
    pub fn mode(&self) -> f64 {
        match *self {
            InnovationLaw::ScaledChiSquare(m) if m > 2 => 1.0 - 2.0 / m as f64,
            _ => 0.0,
        }
    }

    /// ∫ |u f'(u)| du, the small-a limit of (1/a)∫|f(u) − f(u(1+a))| du.
    ///
    /// ```text
    /// unimodal f with mode z*:  2 z* f(z*) + 1 − 2 F(z*)
    /// ```
    /// The uniform law's jump at 2 contributes 2 · (1/2) = 1.
    pub fn scale_derivative_mass(&self) -> f64 {
        match self {
            InnovationLaw::Uniform => 1.0,
            _ => {
                let z = self.mode();
                if z == 0.0 {
                    1.0
                } else {
                    2.0 * z * self.pdf(z) + 1.0 - 2.0 * self.cdf(z)
                }
            }
        }
    }
}

/// An innovation law together with its certified Lipschitz constants for
/// the scale perturbations u ↦ u(1+a).
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationModel {
    pub law: InnovationLaw,
    pub lipschitz_iii: f64,
    pub lipschitz_iv: f64,
}

fn certificate_cache() -> &'static Mutex<HashMap<InnovationLaw, (f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<InnovationLaw, (f64, f64)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl InnovationModel {
    /// Builds the model, certifying K_iii and K_iv on the default a-grid.
    /// Certificates are computed once per law and cached.
    pub fn new(law: InnovationLaw) -> Result<Self> {
        if let Some(&(k3, k4)) = certificate_cache().lock().expect("cache lock").get(&law) {
            return Ok(InnovationModel {
                law,
                lipschitz_iii: k3,
                lipschitz_iv: k4,
            });
        }
        let cert = density_analysis::innovation_tv_lipschitz(&law, &density_analysis::default_a_grid())?;
        Ok(Self::from_certificate(law, &cert))
    }

    pub fn from_certificate(law: InnovationLaw, cert: &LipschitzCertificate) -> Self {
        certificate_cache()
            .lock()
            .expect("cache lock")
            .insert(law, (cert.k_iii, cert.k_iv));
        InnovationModel {
            law,
            lipschitz_iii: cert.k_iii,
            lipschitz_iv: cert.k_iv,
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::new(name.parse()?)
    }

    pub fn name(&self) -> String {
        self.law.to_string()
    }

    pub fn pdf(&self, z: f64) -> f64 {
        self.law.pdf(z)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.law.quantile(u)
    }

    pub fn second_moment(&self) -> f64 {
        self.law.second_moment()
    }

    pub fn abs_moment(&self, nu: f64) -> f64 {
        self.law.abs_moment(nu)
    }
}
