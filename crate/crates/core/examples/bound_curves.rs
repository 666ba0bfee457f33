//! α, β and 2-mixing bound curves for tvARCH(1), ARCH(1) written as an
//! ARCH(∞) process, and an ARCH(∞) process with polynomial coefficients.

use archmix::bounds::{bound_curve, optimize_delta_tilde, BoundOptions, BoundVariant};
use archmix::process_models::{InnovationLaw, InnovationModel, ProcessSpec, SpecFile};

fn load(name: &str) -> ProcessSpec {
    let path = format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    SpecFile::parse(&std::fs::read_to_string(path).unwrap())
        .unwrap()
        .to_spec()
        .unwrap()
}

/// Returns the ARCH(1) α/β bound at k = 4.
pub fn run_example() -> f64 {
    let innov = InnovationModel::new(InnovationLaw::Exponential).unwrap();

    let tv = load("arch1.json");
    let ProcessSpec::TvArch(tv_spec) = &tv else { unreachable!() };
    let best = optimize_delta_tilde(tv_spec, &innov, 0, 20).unwrap();
    println!("tvARCH(1): delta_tilde minimising the k=20 bound: {best:.4}");
    let opts = BoundOptions {
        delta_tilde: Some(0.45),
        ..BoundOptions::default()
    };
    let lags: Vec<usize> = (5..=30).step_by(5).collect();
    let curve = bound_curve(&tv, &innov, &lags, &opts).unwrap();
    for (i, k) in lags.iter().enumerate() {
        println!(
            "  k={k:<3} alpha {:.4e}  beta {:.4e}  exact-weight alpha {:.4e}",
            curve.alpha_bound[i], curve.beta_bound[i], curve.tight_alpha[i]
        );
    }

    let arch1 = load("arch1_inf.json");
    let lags: Vec<usize> = (2..=6).collect();
    let curve = bound_curve(&arch1, &innov, &lags, &BoundOptions::default()).unwrap();
    println!("ARCH(1) as ARCH(inf): alpha/beta = 6(1+sqrt2) 2^(-k/2), 2-mix = 6 sqrt2 2^(-k/2)");
    for (i, k) in lags.iter().enumerate() {
        println!("  k={k} alpha/beta {:.5}  2-mix {:.5}", curve.alpha_bound[i], curve.twomix_bound[i]);
    }
    let at4 = curve.alpha_bound[2];

    let poly = load("archinf_poly.json");
    let lags = [10, 50, 200];
    for variant in [BoundVariant::Packaged, BoundVariant::Tight] {
        let opts = BoundOptions {
            variant,
            ..BoundOptions::default()
        };
        let curve = bound_curve(&poly, &innov, &lags, &opts).unwrap();
        println!("a_j ~ j^-2.5, nu = 4, {variant:?}: class {:?}", curve.rate_class.map(|r| r.to_string()));
        for (i, t) in curve.constants.truncation.iter().enumerate() {
            println!(
                "  k={:<4} alpha/beta {:.4e}  2-mix {:.4e}  I={} i-tail certificate {:.2e}",
                t.k, curve.alpha_bound[i], curve.twomix_bound[i], t.i_max, t.i_tail_certificate
            );
        }
    }
    at4
}

fn main() {
    run_example();
}
