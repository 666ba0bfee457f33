//! Power-series inversion ψ of 1 − Σ_j a_j z^j.

use crate::error::{Error, Result};
use crate::process_models::Coefficients;
use std::sync::RwLock;

/// ψ_0..ψ_L with (1 − Σ_j a_j z^j)^{-1} = Σ_j ψ_j z^j.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiSequence {
    pub values: Vec<f64>,
    /// a_1..a_L used by the inversion.
    pub source_coeffs: Vec<f64>,
}

impl PsiSequence {
    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// max_k |ψ_k − Σ_{j=1}^k a_j ψ_{k−j}| for k ≥ 1.
    pub fn convolution_residual(&self) -> f64 {
        let a = |j: usize| self.source_coeffs.get(j - 1).copied().unwrap_or(0.0);
        (1..self.values.len())
            .map(|k| {
                let conv: f64 = (1..=k).map(|j| a(j) * self.values[k - j]).sum();
                (self.values[k] - conv).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn invert(a: &[f64], len: usize) -> Vec<f64> {
    // a[j] = a_j, a[0] unused
    let mut psi = Vec::with_capacity(len + 1);
    psi.push(1.0);
    extend(a, &mut psi, len);
    psi
}

fn extend(a: &[f64], psi: &mut Vec<f64>, len: usize) {
    for k in psi.len()..=len {
        let top = k.min(a.len().saturating_sub(1));
        let mut s = 0.0;
        for j in 1..=top {
            s += a[j] * psi[k - j];
        }
        psi.push(s);
    }
}

/// ψ_0..ψ_len for a_1.. given as `coeffs[j-1] = a_j`.
pub fn psi_from_slice(coeffs: &[f64], len: usize) -> Result<PsiSequence> {
    let total: f64 = coeffs.iter().sum();
    if total >= 1.0 {
        return Err(Error::Divergence { sum: total });
    }
    let mut a = Vec::with_capacity(coeffs.len() + 1);
    a.push(0.0);
    a.extend_from_slice(coeffs);
    a.truncate(len + 1);
    Ok(PsiSequence {
        values: invert(&a, len),
        source_coeffs: a[1..].to_vec(),
    })
}

/// ψ_0..ψ_len for a coefficient sequence; only a_1..a_len enter.
pub fn psi_coefficients(coeffs: &Coefficients, len: usize) -> Result<PsiSequence> {
    let total = coeffs.total();
    if total >= 1.0 {
        return Err(Error::Divergence { sum: total });
    }
    let a = coeffs.prefix(len);
    Ok(PsiSequence {
        values: invert(&a, len),
        source_coeffs: a[1..].to_vec(),
    })
}

/// Write-once, grow-on-demand ψ table for one coefficient sequence.
#[derive(Debug)]
pub struct PsiTable {
    coeffs: Coefficients,
    a: RwLock<Vec<f64>>,
    psi: RwLock<Vec<f64>>,
}

impl PsiTable {
    pub fn new(coeffs: &Coefficients) -> Result<Self> {
        let total = coeffs.total();
        if total >= 1.0 {
            return Err(Error::Divergence { sum: total });
        }
        Ok(PsiTable {
            coeffs: coeffs.clone(),
            a: RwLock::new(vec![0.0]),
            psi: RwLock::new(vec![1.0]),
        })
    }

    /// ψ_0..ψ_len.
    pub fn prefix(&self, len: usize) -> Vec<f64> {
        {
            let psi = self.psi.read().expect("psi lock");
            if psi.len() > len {
                return psi[..=len].to_vec();
            }
        }
        let mut a = self.a.write().expect("coeff lock");
        for j in a.len()..=len {
            a.push(self.coeffs.get(j));
        }
        let mut psi = self.psi.write().expect("psi lock");
        extend(&a, &mut psi, len);
        psi[..=len].to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series() {
        let p = psi_from_slice(&[0.5], 6).unwrap();
        for (j, v) in p.values.iter().enumerate() {
            assert_eq!(*v, 0.5f64.powi(j as i32));
        }
    }

    #[test]
    fn order_two_hand_values() {
        let p = psi_from_slice(&[0.3, 0.2], 3).unwrap();
        let expect = [1.0, 0.3, 0.29, 0.147];
        for (v, e) in p.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-15);
        }
        assert!(p.convolution_residual() < 1e-15);
    }

    #[test]
    fn empty_inversion() {
        let p = psi_from_slice(&[], 4).unwrap();
        assert_eq!(p.values, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn divergent_sum() {
        assert!(matches!(psi_from_slice(&[0.6, 0.4], 3), Err(Error::Divergence { .. })));
    }

    #[test]
    fn table_matches_direct() {
        let c = Coefficients::power_with_sum(0.7, 2.5);
        let t = PsiTable::new(&c).unwrap();
        let short = t.prefix(5);
        let long = t.prefix(40);
        let direct = psi_coefficients(&c, 40).unwrap();
        assert_eq!(&long[..6], &short[..]);
        assert_eq!(long, direct.values);
    }
}
