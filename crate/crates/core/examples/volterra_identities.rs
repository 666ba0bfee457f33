//! The P/Q split of a future value, checked against the path it came from,
//! and the two routes to Q_{0,k}(1, x) for an ARCH(∞) process.

use archmix::process_models::{tvarch_path_from_innovations, ArchInfSpec, Coefficients, TvArchSpec};
use archmix::volterra::{archinf_path_from_innovations, pq_archinf, pq_tvarch, psi_coefficients, q0k_mean_routes, PastBlock};

/// Returns the largest relative reconstruction error seen.
pub fn run_example() -> f64 {
    let mut worst: f64 = 0.0;

    let tv = TvArchSpec::constant(0.1, &[0.3, 0.2], 0.45);
    let x = [0.4, 0.1];
    let z = [0.7, 1.9, 0.2, 1.1, 0.5, 2.3];
    let path = tvarch_path_from_innovations(&tv, 0, &x, &z).unwrap();
    for (k, s) in [(1, 0), (3, 1), (4, 2)] {
        let n = k + s;
        let pq = pq_tvarch(&tv, &z[..n - 1], &x, s, k, 0).unwrap();
        let err = (path[n - 1] - z[n - 1] * pq.total()).abs() / path[n - 1];
        worst = worst.max(err);
        println!("tvARCH(2) k={k} s={s}: P={:.6} Q={:.6} rel err {err:.1e}", pq.p_term, pq.q_term);
    }

    let inf = ArchInfSpec::new(0.1, Coefficients::power_with_sum(0.5, 2.0), 0.4, 1.0);
    let past = PastBlock {
        values: vec![0.3, 0.2, 0.5, 0.1],
        tail_level: Some(0.2),
    };
    let path = archinf_path_from_innovations(&inf, &past, &z).unwrap();
    for (k, s) in [(2, 0), (3, 2)] {
        let n = k + s;
        let pq = pq_archinf(&inf, &z[..n - 1], &past, s, k, true).unwrap();
        let err = (path[n - 1] - z[n - 1] * pq.total()).abs() / path[n - 1];
        worst = worst.max(err);
        println!("ARCH(inf) k={k} s={s}: P={:.6} Q={:.6} rel err {err:.1e} (chain oracle agrees)", pq.p_term, pq.q_term);
    }
    for k in [1, 10, 50] {
        let r = q0k_mean_routes(&inf, &past, k).unwrap();
        println!("Q_0,{k}(1,x): recursion {:.10e} convolution {:.10e}", r.recursion, r.convolution);
    }
    let psi = psi_coefficients(&inf.coeffs, 8).unwrap();
    println!("psi_0..7 = {:?}", psi.values.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>());
    worst
}

fn main() {
    run_example();
}
