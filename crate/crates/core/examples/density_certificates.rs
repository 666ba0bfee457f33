//! Certified Lipschitz constants of the innovation laws and the scale-mixture
//! total-variation inequality on the standard grid.

use archmix::density_analysis::{default_a_grid, innovation_tv_lipschitz, standard_pairs, tv_report};
use archmix::process_models::{InnovationLaw, InnovationModel};

/// Returns the largest tv / bound ratio across laws.
pub fn run_example() -> f64 {
    let mut worst: f64 = 0.0;
    for law in [
        InnovationLaw::Exponential,
        InnovationLaw::Uniform,
        InnovationLaw::ScaledChiSquare(1),
    ] {
        let cert = innovation_tv_lipschitz(&law, &default_a_grid()).unwrap();
        println!(
            "{law}: K_iii = {:.6}, K_iv = {:.6}, small-a limit {:.6}, tau points {}",
            cert.k_iii, cert.k_iv, cert.small_a_limit, cert.tau_points
        );
        let model = InnovationModel::from_certificate(law, &cert);
        let report = tv_report(&model, &standard_pairs()).unwrap();
        for p in report.points.iter().filter(|p| p.b > 0.0 && p.a == 1.0) {
            println!("  A={} B={:<4} tv={:.6} bound={:.6}", p.a, p.b, p.tv, p.bound);
        }
        println!("  max tv/bound over the grid {:.4}", report.ratio_max);
        worst = worst.max(report.ratio_max);
    }
    worst
}

fn main() {
    run_example();
}
