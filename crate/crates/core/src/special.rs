//! Special functions not covered by statrs.

/// B_{2j} / (2j)! for j = 1..=7.
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

/// Hurwitz zeta ζ(s, q) = Σ_{n≥0} (q+n)^{-s} for s > 1, q > 0, by
/// Euler–Maclaurin summation with the first terms summed directly until
/// q + N ≥ 10.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0 && q > 0.0, "hurwitz_zeta needs s > 1, q > 0");
    let mut sum = 0.0;
    let mut x = q;
    while x < 10.0 {
        sum += x.powf(-s);
        x += 1.0;
    }
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s (s+1) ... (s+2j-2) times x^{-s-2j+1}
    let mut rising = s;
    let mut xp = x.powf(-s - 1.0);
    let x2 = x * x;
    for (j, c) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = c * rising * xp;
        sum += term;
        let m = 2.0 * j as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        xp /= x2;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn riemann_values() {
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-14);
    }

    #[test]
    fn shift_identity() {
        for &s in &[1.1, 1.5, 2.5, 3.7] {
            for &q in &[0.3, 1.0, 4.5, 17.0, 2500.0] {
                let lhs = hurwitz_zeta(s, q) - hurwitz_zeta(s, q + 1.0);
                let rhs = q.powf(-s);
                assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300) + 1e-15, "s={s} q={q}");
            }
        }
    }

    #[test]
    fn direct_sum_agrees() {
        let s = 3.0;
        let q = 2.5;
        let direct: f64 = (0..200_000).map(|n| (q + n as f64).powf(-s)).sum();
        let tail = (q + 200_000.0).powf(1.0 - s) / (s - 1.0);
        assert!((hurwitz_zeta(s, q) - direct - tail).abs() < 1e-12);
    }
}
