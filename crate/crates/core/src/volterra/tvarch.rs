//! P/Q split of a tvARCH(p) future value given the past block.
//!
//! ```text
//! X_{t+k+s} = Z_{t+k+s} (P_{s,k,t} + Q_{s,k,t})
//! s = 0:      Q_{0,k,t} = e₁ᵀ Ã_{t+k} A_{t+k−1} ⋯ A_{t+1} x
//!             P_{0,k,t} = a₀(t+k) + e₁ᵀ Ã_{t+k} Σ_{r=0}^{k−2} A_{t+k−1} ⋯ A_{t+k−r} b_{t+k−r−1}
//! 1 ≤ s ≤ p:  P = a₀ + Σ_{i<s} a_i X_{t+k+s−i} + Σ_{i≥s} a_i Z_{t+m} P_{0,m,t}
//!             Q = Σ_{i≥s} a_i (Z_{t+m} Q_{0,m,t}  or  x_{−m} when m ≤ 0),  m = k+s−i
//! s > p:      P = a₀ + Σ_i a_i X_{t+k+s−i},  Q = 0
//! ```
//! (coefficients evaluated at t+k+s).

use super::PqTerms;
use crate::error::{Error, Result};
use crate::process_models::{companion_apply, tvarch_path_from_innovations, TvArchSpec};

fn check_inputs(spec: &TvArchSpec, z: &[f64], x: &[f64], s: usize, k: usize, t: i64) -> Result<()> {
    let p = spec.order();
    if k == 0 {
        return Err(Error::validation("k", "must be at least 1"));
    }
    if x.len() != p {
        return Err(Error::validation("x", format!("past block needs length p = {p}, got {}", x.len())));
    }
    if z.len() != k + s - 1 {
        return Err(Error::validation(
            "z",
            format!("innovation block needs length k+s-1 = {}, got {}", k + s - 1, z.len()),
        ));
    }
    if let Some(v) = x.iter().chain(z).find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::validation("z/x", format!("entries must be finite and nonnegative, got {v}")));
    }
    spec.validate(t - p as i64 + 1..t + (k + s) as i64 + 1)
}

/// P_{0,m,t} and Q_{0,m,t} for m = 1..=n by iterating the companion recursion
/// once; index 0 of each vector is unused.
fn base_terms(spec: &TvArchSpec, z: &[f64], x: &[f64], t: i64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let p = spec.order();
    let mut vq = x.to_vec();
    let mut vp = vec![0.0; p];
    let mut ps = vec![0.0; n + 1];
    let mut qs = vec![0.0; n + 1];
    for m in 1..=n {
        let tm = t + m as i64;
        if m > 1 {
            let tau = tm - 1;
            let zt = z[m - 2];
            vq = companion_apply(spec, tau, zt, &vq);
            vp = companion_apply(spec, tau, zt, &vp);
            vp[0] += spec.a0(tau) * zt;
        }
        let mut p_acc = spec.a0(tm);
        let mut q_acc = 0.0;
        for j in 1..=p {
            let a = spec.a(j, tm);
            p_acc += a * vp[j - 1];
            q_acc += a * vq[j - 1];
        }
        ps[m] = p_acc;
        qs[m] = q_acc;
    }
    (ps, qs)
}

/// P/Q terms of X_{t+k+s}. `z` holds Z_{t+1}, …, Z_{t+k+s−1}; `x` holds
/// (X_t, X_{t−1}, …, X_{t−p+1}).
pub fn pq_tvarch(spec: &TvArchSpec, z: &[f64], x: &[f64], s: usize, k: usize, t: i64) -> Result<PqTerms> {
    check_inputs(spec, z, x, s, k, t)?;
    let p = spec.order();
    let (p_term, q_term) = if s == 0 {
        let (ps, qs) = base_terms(spec, z, x, t, k);
        (ps[k], qs[k])
    } else {
        let tau = t + (k + s) as i64;
        let path = tvarch_path_from_innovations(spec, t, x, z)?;
        let xv = |m: i64| -> f64 {
            if m >= 1 {
                path[(m - 1) as usize]
            } else {
                x[(-m) as usize]
            }
        };
        let mut p_term = spec.a0(tau);
        let mut q_term = 0.0;
        if s > p {
            for i in 1..=p {
                p_term += spec.a(i, tau) * xv((k + s - i) as i64);
            }
        } else {
            let (ps, qs) = base_terms(spec, z, x, t, k + s - 1);
            for i in 1..s {
                p_term += spec.a(i, tau) * xv((k + s - i) as i64);
            }
            for i in s..=p {
                let a = spec.a(i, tau);
                let m = (k + s) as i64 - i as i64;
                if m >= 1 {
                    let zm = z[(m - 1) as usize];
                    p_term += a * zm * ps[m as usize];
                    q_term += a * zm * qs[m as usize];
                } else {
                    q_term += a * x[(-m) as usize];
                }
            }
        }
        (p_term, q_term)
    };
    Ok(PqTerms {
        p_term,
        q_term,
        s,
        k,
        t,
        conditioning_block: z.to_vec(),
    })
}

/// Weights w with Q_{s,k,t}(1, x) = w · x.
pub fn q_weights_tvarch(spec: &TvArchSpec, s: usize, k: usize, t: i64) -> Result<Vec<f64>> {
    let p = spec.order();
    let ones = vec![1.0; k + s - 1];
    (0..p)
        .map(|i| {
            let mut e = vec![0.0; p];
            e[i] = 1.0;
            pq_tvarch(spec, &ones, &e, s, k, t).map(|r| r.q_term)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process_models::{Schedule, TvArchSpec};

    fn arch1() -> TvArchSpec {
        TvArchSpec::constant(0.1, &[0.5], 0.5)
    }

    #[test]
    fn one_step() {
        let r = pq_tvarch(&arch1(), &[], &[2.0], 0, 1, 0).unwrap();
        assert!((r.p_term - 0.1).abs() < 1e-15);
        assert!((r.q_term - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_steps() {
        let r = pq_tvarch(&arch1(), &[1.0], &[2.0], 0, 2, 0).unwrap();
        assert!((r.p_term - 0.15).abs() < 1e-15);
        assert!((r.q_term - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_past_kills_q() {
        let spec = TvArchSpec::constant(0.2, &[0.3, 0.1, 0.2], 0.3);
        for s in 0..5 {
            let z = vec![1.3; 4 + s - 1];
            let r = pq_tvarch(&spec, &z, &[0.0; 3], s, 4, 7).unwrap();
            assert_eq!(r.q_term, 0.0);
        }
    }

    #[test]
    fn beyond_order_q_is_zero() {
        let spec = TvArchSpec::constant(0.2, &[0.3, 0.2], 0.3);
        let r = pq_tvarch(&spec, &[0.5, 1.5, 2.0, 0.7], &[1.0, 3.0], 3, 2, 0).unwrap();
        assert_eq!(r.q_term, 0.0);
    }

    #[test]
    fn reproduces_path_time_varying() {
        let spec = TvArchSpec {
            intercept: Schedule::Sinusoid {
                level: 0.3,
                amplitude: 0.1,
                period: 7.0,
            },
            coeffs: vec![
                Schedule::Piecewise {
                    breaks: vec![0, 4],
                    values: vec![0.2, 0.4],
                },
                Schedule::Constant(0.15),
            ],
            delta: 0.4,
        };
        let x = [0.8, 1.7];
        let zs = [0.3, 1.9, 0.6, 1.2, 2.2, 0.1, 0.9, 1.4, 0.5, 1.1, 0.7];
        let path = tvarch_path_from_innovations(&spec, 2, &x, &zs).unwrap();
        for k in 1..=8 {
            for s in 0..=3 {
                let n = k + s;
                let r = pq_tvarch(&spec, &zs[..n - 1], &x, s, k, 2).unwrap();
                let rebuilt = zs[n - 1] * (r.p_term + r.q_term);
                assert!((rebuilt - path[n - 1]).abs() <= 1e-12 * path[n - 1], "k={k} s={s}");
            }
        }
    }

    #[test]
    fn arch1_weights_are_powers() {
        for k in 1..10 {
            let w = q_weights_tvarch(&arch1(), 0, k, 0).unwrap();
            assert!((w[0] - 0.5f64.powi(k as i32)).abs() < 1e-16);
        }
    }

    #[test]
    fn length_mismatch_is_validation_error() {
        assert!(matches!(
            pq_tvarch(&arch1(), &[1.0, 1.0], &[2.0], 0, 2, 0),
            Err(Error::Validation { .. })
        ));
    }
}
