//! Bound-versus-estimate sweep through the same entry points the CLI uses,
//! then the plain-text report.

use archmix::cli::{compute_bounds, compute_estimates, render_report, sweep_rows, ExperimentConfig};
use archmix::process_models::SpecFile;

/// Returns the number of lags where estimate − 3·SE exceeds the bound.
pub fn run_example() -> usize {
    let path = format!("{}/fixtures/tvarch2.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap();
    let config = ExperimentConfig {
        command: "sweep".into(),
        suites: Vec::new(),
        spec_path: Some(path),
        spec_sha256: None,
        spec: Some(SpecFile::parse(&text).unwrap()),
        innovation: "exponential".into(),
        seed: Some(11),
        k_min: 1,
        k_max: 8,
        samples: 160_000,
        replicates: 16,
        grid: Some(4),
        r_left: None,
        r_right: None,
        anchor: "pooled".into(),
        t: 0,
        delta_tilde: None,
        variant: "packaged".into(),
        literal_two_mix: false,
        s_max: None,
        i_max: None,
        tail_tol: 1e-3,
        truncation_lag: None,
        burn_in: None,
        bounds: true,
        estimates: true,
        input: None,
        out: String::new(),
        workers: 1,
    };
    config.validate().unwrap();
    let bounds = compute_bounds(&config).unwrap();
    let estimates = compute_estimates(&config).unwrap();
    let rows = sweep_rows(&config.lags(), Some(&estimates), Some(&bounds));
    print!("{}", render_report(Some(&config.hash()), &rows));
    rows.iter().filter(|r| r.dominated() == Some(false)).count()
}

fn main() {
    run_example();
}
