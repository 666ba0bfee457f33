//! Identity suites run by `archmix verify`.

use crate::bounds::{minimize_eta, minimize_eta_numeric, EtaProblem, SEARCH_TOL};
use crate::density_analysis::{
    conditional_density_mass, scale_mixture_tv_value, standard_pairs, sup_family_tv, DOMINANCE_SLACK,
};
use crate::error::{Error, Result};
use crate::process_models::{
    stationary_mean_bound, tvarch_path_from_innovations, InnovationLaw, InnovationModel, ProcessSpec,
};
use crate::volterra::{
    archinf_path_from_innovations, pq_archinf, pq_tvarch, psi_coefficients, psi_from_slice, q0k_mean_routes,
    q_weights_tvarch, PastBlock, CHAIN_ORACLE_LIMIT,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Volterra,
    Density,
    MinimizeEta,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Volterra, Suite::Density, Suite::MinimizeEta];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Volterra => "volterra",
            Suite::Density => "density",
            Suite::MinimizeEta => "minimize-eta",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::validation("suite", format!("unknown suite `{s}` (volterra, density, minimize-eta)")))
    }
}

/// One checked quantity: pass iff value ≤ tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub suite: &'static str,
    pub check: String,
    pub value: f64,
    pub tolerance: f64,
}

impl CheckRow {
    pub fn passed(&self) -> bool {
        self.value <= self.tolerance
    }
}

fn row(suite: Suite, check: impl Into<String>, value: f64, tolerance: f64) -> CheckRow {
    CheckRow {
        suite: suite.name(),
        check: check.into(),
        value: if value.is_nan() { f64::INFINITY } else { value },
        tolerance,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

pub fn run_suite(suite: Suite, spec: &ProcessSpec, innovation: &InnovationModel, seed: u64) -> Result<Vec<CheckRow>> {
    match suite {
        Suite::Volterra => volterra(spec, innovation, seed),
        Suite::Density => density(innovation),
        Suite::MinimizeEta => minimize_eta_suite(seed),
    }
}

fn draw_z(rng: &mut ChaCha8Rng, innovation: &InnovationModel, n: usize) -> Vec<f64> {
    (0..n).map(|_| innovation.quantile(rng.random::<f64>())).collect()
}

fn volterra(spec: &ProcessSpec, innovation: &InnovationModel, seed: u64) -> Result<Vec<CheckRow>> {
    let s = Suite::Volterra;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    match spec {
        ProcessSpec::TvArch(tv) => {
            let p = tv.order();
            let level = stationary_mean_bound(spec, 0..p as i64 + 1)?;
            let mut worst: f64 = 0.0;
            let mut worst_q: f64 = 0.0;
            for k in 1..=8 {
                for sh in 0..=3 {
                    let x: Vec<f64> = (0..p).map(|_| 2.0 * level * rng.random::<f64>()).collect();
                    let z = draw_z(&mut rng, innovation, k + sh);
                    let path = tvarch_path_from_innovations(tv, 0, &x, &z)?;
                    let pq = pq_tvarch(tv, &z[..k + sh - 1], &x, sh, k, 0)?;
                    worst = worst.max(rel(path[k + sh - 1], z[k + sh - 1] * pq.total()));
                    let ones = vec![1.0; k + sh - 1];
                    let q1 = pq_tvarch(tv, &ones, &x, sh, k, 0)?.q_term;
                    let w = q_weights_tvarch(tv, sh, k, 0)?;
                    let lin: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
                    worst_q = worst_q.max(rel(q1, lin));
                }
            }
            rows.push(row(s, "pq_reproduces_path(k<=8,s<=3)", worst, 1e-10));
            rows.push(row(s, "q_linear_in_past(k<=8,s<=3)", worst_q, 1e-12));
            let a: Vec<f64> = (1..=p).map(|j| tv.a(j, 0)).collect();
            let psi = psi_from_slice(&a, 200)?;
            rows.push(row(s, "psi_convolution_residual(t=0)", psi.convolution_residual(), 1e-12));
        }
        ProcessSpec::ArchInf(ai) => {
            let level = stationary_mean_bound(spec, 0..1)?;
            let mut worst: f64 = 0.0;
            for k in 1..=8 {
                for sh in 0..=3 {
                    let past = PastBlock {
                        values: (0..30).map(|_| 2.0 * level * rng.random::<f64>()).collect(),
                        tail_level: Some(level),
                    };
                    let z = draw_z(&mut rng, innovation, k + sh);
                    let path = archinf_path_from_innovations(ai, &past, &z)?;
                    let pq = pq_archinf(ai, &z[..k + sh - 1], &past, sh, k, k + sh <= CHAIN_ORACLE_LIMIT)?;
                    worst = worst.max(rel(path[k + sh - 1], z[k + sh - 1] * pq.total()));
                }
            }
            rows.push(row(s, "pq_reproduces_path(k<=8,s<=3)", worst, 1e-10));
            let mut dual: f64 = 0.0;
            for k in 1..=50 {
                let past = PastBlock {
                    values: (0..20).map(|_| 2.0 * level * rng.random::<f64>()).collect(),
                    tail_level: Some(level),
                };
                dual = dual.max(q0k_mean_routes(ai, &past, k)?.rel_diff());
            }
            rows.push(row(s, "q0k_recursion_vs_psi_convolution(k<=50)", dual, 1e-10));
            let psi = psi_coefficients(&ai.coeffs, 200)?;
            rows.push(row(s, "psi_convolution_residual", psi.convolution_residual(), 1e-12));
        }
    }
    Ok(rows)
}

fn density(innovation: &InnovationModel) -> Result<Vec<CheckRow>> {
    let s = Suite::Density;
    let law = innovation.law;
    let mut rows = Vec::new();
    for (a, b) in standard_pairs() {
        let tv = scale_mixture_tv_value(&law, a, b)?;
        let bound = innovation.lipschitz_iii * b / a + b / (a + b);
        rows.push(row(s, format!("dominance(A={a},B={b})"), tv - bound, DOMINANCE_SLACK));
        if law == InnovationLaw::Uniform {
            rows.push(row(s, format!("uniform_closed_form(A={a},B={b})"), (tv - 2.0 * b / (a + b)).abs(), 1e-9));
        }
    }
    for a in [0.5, 1.0, 2.0] {
        let (value, bound) = sup_family_tv(innovation, a, &[0.1, 1.0, 10.0])?;
        rows.push(row(s, format!("sup_family_dominance(A={a})"), value - bound, DOMINANCE_SLACK));
    }
    for (p, q) in [(0.1, 0.0), (1.0, 0.5), (2.0, 3.0)] {
        let mass = conditional_density_mass(&law, p, q)?;
        rows.push(row(s, format!("conditional_density_mass(P={p},Q={q})"), (mass - 1.0).abs(), 1e-8));
    }
    Ok(rows)
}

/// Random problems with length ≤ 8 and ν ∈ {0.5, 1, 2, 3}.
pub fn random_eta_problem(rng: &mut ChaCha8Rng) -> EtaProblem {
    let len = rng.random_range(1..=8);
    let nu = [0.5, 1.0, 2.0, 3.0][rng.random_range(0..4)];
    let mut draw = || (rng.random::<f64>() * 6.0 - 3.0).exp();
    let c: Vec<f64> = (0..len).map(|_| draw()).collect();
    let d: Vec<f64> = (0..len).map(|_| draw()).collect();
    EtaProblem::new(c, d, nu).expect("positive entries")
}

fn minimize_eta_suite(seed: u64) -> Result<Vec<CheckRow>> {
    let s = Suite::MinimizeEta;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vs_numeric: f64 = 0.0;
    let mut plug_back: f64 = 0.0;
    let mut beaten: f64 = 0.0;
    for i in 0..100 {
        let p = random_eta_problem(&mut rng);
        let closed = minimize_eta(&p);
        let numeric = minimize_eta_numeric(&p, SEARCH_TOL);
        vs_numeric = vs_numeric.max(rel(closed.value, numeric.value));
        plug_back = plug_back.max(rel(p.objective(&closed.eta), closed.value));
        if i < 10 {
            for _ in 0..1000 {
                let eta: Vec<f64> = (0..p.c.len()).map(|_| (rng.random::<f64>() * 8.0 - 4.0).exp()).collect();
                beaten = beaten.max((closed.value - p.objective(&eta)) / closed.value);
            }
        }
    }
    Ok(vec![
        row(s, "closed_form_vs_numeric(100 problems)", vs_numeric, 1e-8),
        row(s, "plug_back_objective", plug_back, 1e-12),
        row(s, "closed_form_below_random_points", beaten, 1e-12),
    ])
}
