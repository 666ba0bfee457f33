//! P/Q split for ARCH(∞) with time origin 0 and past block
//! x = (x_0, x_{−1}, …).
//!
//! ```text
//! d_k(x)  = Σ_{i≥0} a_{k+i} x_{−i}                 (0 for k ≤ 0)
//! P_{0,n} = a₀ + Σ_{j=1}^{n−1} a_j Z_{n−j} P_{0,n−j}
//! Q_{0,n} = Σ_{j=1}^{n−1} a_j Z_{n−j} Q_{0,n−j} + d_n(x)
//! s ≥ 1:
//! P_{s,k} = a₀ + Σ_{j=1}^{s} a_j X_{k+s−j} + Σ_{j=s+1}^{k+s−1} a_j Z_{k+s−j} P_{0,k+s−j}
//! Q_{s,k} = Σ_{j=s+1}^{k+s−1} a_j Z_{k+s−j} Q_{0,k+s−j} + d_{k+s}(x)
//! Q_{0,k}(1, x) = Σ_{j=0}^{k−1} ψ_j d_{k−j}(x)
//! ```

use super::psi::psi_coefficients;
use super::PqTerms;
use crate::error::{Error, Result};
use crate::process_models::ArchInfSpec;

/// Largest chain length the enumeration oracle accepts.
pub const CHAIN_ORACLE_LIMIT: usize = 12;

/// Past block x_0, x_{−1}, … with finite support, optionally continued by a
/// constant level for all indices beyond the listed values.
#[derive(Debug, Clone, PartialEq)]
pub struct PastBlock {
    pub values: Vec<f64>,
    pub tail_level: Option<f64>,
}

impl PastBlock {
    pub fn finite(values: Vec<f64>) -> Self {
        PastBlock {
            values,
            tail_level: None,
        }
    }

    /// x_{−i} = level for every i.
    pub fn constant(level: f64) -> Self {
        PastBlock {
            values: Vec::new(),
            tail_level: Some(level),
        }
    }

    /// x_{−i}.
    pub fn get(&self, i: usize) -> f64 {
        self.values
            .get(i)
            .copied()
            .unwrap_or_else(|| self.tail_level.unwrap_or(0.0))
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        PastBlock {
            values: self.values.iter().map(|v| v * lambda).collect(),
            tail_level: self.tail_level.map(|v| v * lambda),
        }
    }

    fn validate(&self) -> Result<()> {
        if let Some(v) = self.values.iter().chain(self.tail_level.iter()).find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::validation("x", format!("past values must be finite and nonnegative, got {v}")));
        }
        Ok(())
    }
}

/// d_k(x) for k = 1..=k_max; `get` returns 0 for k ≤ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TailFunctional {
    /// values[k] = d_k; values[0] = 0.
    pub values: Vec<f64>,
}

impl TailFunctional {
    pub fn get(&self, k: i64) -> f64 {
        if k <= 0 {
            0.0
        } else {
            self.values[k as usize]
        }
    }

    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }
}

/// d_1(x)..d_{k_max}(x), with constant tails summed through the analytic
/// coefficient tail sums.
pub fn d_sequence(spec: &ArchInfSpec, x: &PastBlock, k_max: usize) -> Result<TailFunctional> {
    x.validate()?;
    spec.coeffs.validate()?;
    let n = x.values.len();
    let mut values = vec![0.0; k_max + 1];
    for (k, v) in values.iter_mut().enumerate().skip(1) {
        let mut d = 0.0;
        for (i, xv) in x.values.iter().enumerate() {
            d += spec.coeffs.get(k + i) * xv;
        }
        if let Some(level) = x.tail_level {
            if level > 0.0 {
                d += level * spec.coeffs.tail_sum(k + n);
            }
        }
        *v = d;
    }
    Ok(TailFunctional { values })
}

/// Q_{0,k}(1, x) by the linear recursion and by the ψ-convolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualRoute {
    pub recursion: f64,
    pub convolution: f64,
}

impl DualRoute {
    pub fn rel_diff(&self) -> f64 {
        let scale = self.recursion.abs().max(self.convolution.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.recursion - self.convolution).abs() / scale
        }
    }
}

pub fn q0k_mean_routes(spec: &ArchInfSpec, x: &PastBlock, k: i64) -> Result<DualRoute> {
    if k <= 0 {
        return Ok(DualRoute {
            recursion: 0.0,
            convolution: 0.0,
        });
    }
    let k = k as usize;
    let d = d_sequence(spec, x, k)?;
    let a = spec.coeffs.prefix(k);
    let mut q = vec![0.0; k + 1];
    for n in 1..=k {
        let mut acc = 0.0;
        for j in 1..n {
            acc += a[j] * q[n - j];
        }
        q[n] = acc + d.values[n];
    }
    let psi = psi_coefficients(&spec.coeffs, k)?;
    let convolution = (0..k).map(|j| psi.values[j] * d.values[k - j]).sum();
    Ok(DualRoute {
        recursion: q[k],
        convolution,
    })
}

/// Q_{0,k}(1, x), checked against the ψ-convolution to 1e-10 relative.
pub fn q0k_mean(spec: &ArchInfSpec, x: &PastBlock, k: i64) -> Result<f64> {
    let r = q0k_mean_routes(spec, x, k)?;
    if r.rel_diff() > 1e-10 {
        return Err(Error::InternalConsistency {
            check: format!("recursion vs psi-convolution for Q_0,{k}"),
            rel_err: r.rel_diff(),
        });
    }
    Ok(r.recursion)
}

/// Exact path X_1..X_{z.len()} from explicit innovations and the past block:
/// X_n = Z_n (a₀ + Σ_{j=1}^{n−1} a_j X_{n−j} + d_n(x)).
pub fn archinf_path_from_innovations(spec: &ArchInfSpec, x: &PastBlock, z: &[f64]) -> Result<Vec<f64>> {
    let n = z.len();
    let d = d_sequence(spec, x, n)?;
    let a = spec.coeffs.prefix(n);
    let mut path = vec![0.0; n + 1];
    for m in 1..=n {
        let mut acc = spec.intercept;
        for j in 1..m {
            acc += a[j] * path[m - j];
        }
        path[m] = z[m - 1] * (acc + d.values[m]);
    }
    path.remove(0);
    Ok(path)
}

/// P_{0,n} and Q_{0,n} for n = 1..=n_max by the linear recursions.
fn base_terms(a: &[f64], a0: f64, z: &[f64], d: &TailFunctional, n_max: usize) -> (Vec<f64>, Vec<f64>) {
    let mut ps = vec![0.0; n_max + 1];
    let mut qs = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        let mut p = a0;
        let mut q = d.values[n];
        for j in 1..n {
            let w = a[j] * z[n - j - 1];
            p += w * ps[n - j];
            q += w * qs[n - j];
        }
        ps[n] = p;
        qs[n] = q;
    }
    (ps, qs)
}

/// P_{0,n}, Q_{0,n} by summing over all chains 0 < j_1 < ⋯ < j_m = n:
/// weight ∏ a_{j_{i+1}−j_i} ∏_{i<m} Z_{j_i}; P collects a₀ per chain and Q
/// collects d_{j_1}.
fn chain_terms(a: &[f64], a0: f64, z: &[f64], d: &TailFunctional, n: usize) -> (f64, f64) {
    let inner = n - 1;
    let mut p = 0.0;
    let mut q = 0.0;
    for mask in 0u32..(1u32 << inner) {
        // chain members below n are the set bits (bit b ↦ index b+1)
        let mut w = 1.0;
        let mut first = n;
        let mut prev: Option<usize> = None;
        for b in 0..inner {
            if mask & (1 << b) != 0 {
                let j = b + 1;
                if let Some(pj) = prev {
                    w *= a[j - pj];
                } else {
                    first = j;
                }
                w *= z[j - 1];
                prev = Some(j);
            }
        }
        if let Some(pj) = prev {
            w *= a[n - pj];
        }
        p += a0 * w;
        q += w * d.values[first];
    }
    (p, q)
}

/// P/Q terms of X_{k+s}. `z` holds Z_1..Z_{k+s−1}. With `chain_oracle`, the
/// chain-enumeration values are computed as well and must agree with the
/// recursion to 1e-10 relative.
pub fn pq_archinf(
    spec: &ArchInfSpec,
    z: &[f64],
    x: &PastBlock,
    s: usize,
    k: usize,
    chain_oracle: bool,
) -> Result<PqTerms> {
    spec.validate()?;
    if k == 0 {
        return Err(Error::validation("k", "must be at least 1"));
    }
    let n = k + s;
    if z.len() != n - 1 {
        return Err(Error::validation(
            "z",
            format!("innovation block needs length k+s-1 = {}, got {}", n - 1, z.len()),
        ));
    }
    if let Some(v) = z.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::validation("z", format!("entries must be finite and nonnegative, got {v}")));
    }
    let base_max = if s == 0 { k } else { n - 1 };
    if chain_oracle && base_max > CHAIN_ORACLE_LIMIT {
        return Err(Error::CombinatorialLimit {
            k: base_max,
            limit: CHAIN_ORACLE_LIMIT,
        });
    }
    let d = d_sequence(spec, x, n)?;
    let a = spec.coeffs.prefix(n);
    let a0 = spec.intercept;
    let (ps, qs) = base_terms(&a, a0, z, &d, base_max);
    if chain_oracle {
        for m in 1..=base_max {
            let (cp, cq) = chain_terms(&a, a0, z, &d, m);
            for (label, route, chain) in [("P", ps[m], cp), ("Q", qs[m], cq)] {
                let scale = route.abs().max(chain.abs());
                let rel = if scale == 0.0 { 0.0 } else { (route - chain).abs() / scale };
                if rel > 1e-10 {
                    return Err(Error::InternalConsistency {
                        check: format!("chain enumeration vs recursion for {label}_0,{m}"),
                        rel_err: rel,
                    });
                }
            }
        }
    }
    let (p_term, q_term) = if s == 0 {
        (ps[k], qs[k])
    } else {
        let path = archinf_path_from_innovations(spec, x, z)?;
        let mut p = a0;
        for j in 1..=s {
            p += a[j] * path[n - j - 1];
        }
        let mut q = d.values[n];
        for j in s + 1..n {
            let w = a[j] * z[n - j - 1];
            p += w * ps[n - j];
            q += w * qs[n - j];
        }
        (p, q)
    };
    Ok(PqTerms {
        p_term,
        q_term,
        s,
        k,
        t: 0,
        conditioning_block: z.to_vec(),
    })
}
