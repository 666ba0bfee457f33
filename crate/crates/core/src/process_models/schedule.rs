//! Time-varying coefficient schedules t ↦ a(t) for tvARCH specifications.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A real-valued schedule over integer time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Schedule {
    Constant(f64),
    /// `values[i]` holds on `[breaks[i], breaks[i+1])`; times before
    /// `breaks[0]` take `values[0]`.
    Piecewise { breaks: Vec<i64>, values: Vec<f64> },
    /// `level + amplitude · sin(2πt / period)`
    Sinusoid { level: f64, amplitude: f64, period: f64 },
}

impl Schedule {
    pub fn value(&self, t: i64) -> f64 {
        match self {
            Schedule::Constant(v) => *v,
            Schedule::Piecewise { breaks, values } => {
                let idx = breaks.partition_point(|&b| b <= t);
                values[idx.saturating_sub(1)]
            }
            Schedule::Sinusoid {
                level,
                amplitude,
                period,
            } => level + amplitude * (2.0 * std::f64::consts::PI * t as f64 / period).sin(),
        }
    }

    pub(crate) fn validate_shape(&self, field: &str) -> Result<()> {
        match self {
            Schedule::Constant(_) => Ok(()),
            Schedule::Piecewise { breaks, values } => {
                if breaks.is_empty() || breaks.len() != values.len() {
                    return Err(Error::validation(field, "breaks and values must be nonempty and of equal length"));
                }
                if breaks.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::validation(field, "breaks must be strictly increasing"));
                }
                Ok(())
            }
            Schedule::Sinusoid { period, .. } => {
                if *period > 0.0 {
                    Ok(())
                } else {
                    Err(Error::validation(field, "period must be positive"))
                }
            }
        }
    }
}
