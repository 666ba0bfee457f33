//! Empirical α, β and 2-mixing estimates for ARCH(1), their covariance
//! decay, and a geometric-versus-polynomial decay fit.

use archmix::mixing_estimation::{covariance_curve, decay_fit, estimate_curve, Anchor, EstimateConfig};
use archmix::process_models::{simulate_tvarch, InnovationLaw, InnovationModel, TvArchSpec};

/// Returns (α̂(1), α̂(6)).
pub fn run_example() -> (f64, f64) {
    let spec = TvArchSpec::constant(0.1, &[0.5], 0.5);
    let innov = InnovationModel::new(InnovationLaw::Exponential).unwrap();
    let ens = simulate_tvarch(&spec, &innov, 0..12_500, 16, 7, None).unwrap();
    let lags: Vec<usize> = (1..=6).collect();
    let config = EstimateConfig {
        anchor: Anchor::Pooled,
        r_left: 0,
        r_right: 0,
        m: 8,
    };
    let est = estimate_curve(&ens, &lags, &config).unwrap();
    println!("k   2-mix      alpha      beta       (batch SE of alpha)");
    for (i, k) in lags.iter().enumerate() {
        println!(
            "{k:<3} {:.4e} {:.4e} {:.4e} ({:.1e})",
            est.twomix_hat[i], est.alpha_hat[i], est.beta_hat[i], est.se_alpha[i]
        );
    }
    let cov = covariance_curve(&ens, &lags).unwrap();
    let fit = decay_fit(&lags, &cov.cov, 1..=6).unwrap();
    println!("covariance decay fit: {:?}, r^2 {:.3}", fit.class, fit.r_squared);
    (est.alpha_hat[0], est.alpha_hat[5])
}

fn main() {
    run_example();
}
