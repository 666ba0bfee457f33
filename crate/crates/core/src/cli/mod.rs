//! The `archmix` command-line driver.
//!
//! Commands: `simulate`, `bound`, `estimate`, `verify`, `sweep`, `report`.
//! Every command resolves its flags into an [`ExperimentConfig`], whose
//! SHA-256 over the canonical JSON (output directory and worker count
//! excluded) stamps every file written.

mod output;
mod verify;

pub use output::{fmt_f64, fmt_opt, Csv};
pub use verify::{random_eta_problem, run_suite, CheckRow, Suite};

use crate::bounds::{bound_curve, ArchInfBoundConfig, BoundCurve, BoundOptions, BoundVariant};
use crate::error::{Error, Result};
use crate::mixing_estimation::{decay_fit, estimate_curve, Anchor, EstimateConfig, EstimateCurve, FitClass};
use crate::process_models::{
    simulate_archinf, simulate_tvarch, ArchInfSimOptions, InnovationModel, PathEnsemble, ProcessSpec, SpecFile,
};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Default output directory.
pub const DEFAULT_OUT: &str = "archmix-out";
/// Environment variable that overrides `--out`.
pub const OUT_ENV: &str = "ARCHMIX_OUT";
pub const DEFAULT_REPLICATES: usize = 16;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
pub const DEFAULT_SIMULATE_SAMPLES: usize = 10_000;
pub const DEFAULT_K_MAX: usize = 20;
/// Relative neglected coefficient mass when truncating ARCH(∞) simulation.
pub const DEFAULT_TAIL_TOL: f64 = 1e-3;

#[derive(Parser, Debug)]
#[command(name = "archmix", version, about = "Mixing-rate bounds and estimators for tvARCH and ARCH(∞) processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate an ensemble and write paths.csv.
    Simulate(RunArgs),
    /// Evaluate the α/β/2-mixing bounds and write bound.csv.
    Bound(RunArgs),
    /// Estimate α, β and 2-mixing coefficients and write estimate.csv.
    Estimate(RunArgs),
    /// Run identity suites (volterra, density, minimize-eta; default all).
    Verify {
        suites: Vec<String>,
        #[command(flatten)]
        args: RunArgs,
    },
    /// Bound and estimate over a lag range and write sweep.csv.
    Sweep(RunArgs),
    /// Summarise a sweep.csv as report.txt.
    Report(RunArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct RunArgs {
    /// Process spec JSON file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Saved config JSON to rerun; replaces every knob except --out/--workers.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Innovation law (exponential, uniform, chi-square(m)); overrides the spec file.
    #[arg(long)]
    innovation: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Lag range A..B (inclusive) or a single K meaning 1..K.
    #[arg(short = 'k', long = "k", value_name = "A..B")]
    k: Option<String>,
    /// Total samples N = replicates × path length.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    /// Cells per coordinate m.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    r_left: Option<usize>,
    #[arg(long)]
    r_right: Option<usize>,
    /// `pooled` or a fixed time t.
    #[arg(long)]
    anchor: Option<String>,
    /// Reference time for tvARCH bounds.
    #[arg(long, allow_hyphen_values = true)]
    t: Option<i64>,
    #[arg(long)]
    delta_tilde: Option<f64>,
    #[arg(long, conflicts_with = "packaged")]
    tight: bool,
    #[arg(long)]
    packaged: bool,
    /// Use a_j ψ_j in the 2-mixing bracket.
    #[arg(long = "literal-two-mix", alias = "theorem42-literal")]
    literal_two_mix: bool,
    #[arg(long)]
    s_max: Option<usize>,
    #[arg(long)]
    i_max: Option<usize>,
    /// ARCH(∞) simulation truncation tolerance.
    #[arg(long)]
    tail_tol: Option<f64>,
    #[arg(long)]
    truncation_lag: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    no_bounds: bool,
    #[arg(long)]
    no_estimates: bool,
    /// Input sweep.csv for `report`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

/// Fully resolved knobs of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(default)]
    pub suites: Vec<String>,
    pub spec_path: Option<String>,
    pub spec_sha256: Option<String>,
    pub spec: Option<SpecFile>,
    pub innovation: String,
    pub seed: Option<u64>,
    pub k_min: usize,
    pub k_max: usize,
    pub samples: usize,
    pub replicates: usize,
    pub grid: Option<usize>,
    pub r_left: Option<usize>,
    pub r_right: Option<usize>,
    pub anchor: String,
    pub t: i64,
    pub delta_tilde: Option<f64>,
    pub variant: String,
    pub literal_two_mix: bool,
    pub s_max: Option<usize>,
    pub i_max: Option<usize>,
    pub tail_tol: f64,
    pub truncation_lag: Option<usize>,
    pub burn_in: Option<usize>,
    pub bounds: bool,
    pub estimates: bool,
    pub input: Option<String>,
    pub out: String,
    pub workers: usize,
}

impl ExperimentConfig {
    /// The config with `out` and `workers` cleared; these only say where and
    /// how fast a run happens, never what it computes.
    pub fn canonical(&self) -> Self {
        ExperimentConfig {
            out: String::new(),
            workers: 0,
            ..self.clone()
        }
    }

    /// SHA-256 of the canonical JSON.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&self.canonical()).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn lags(&self) -> Vec<usize> {
        (self.k_min..=self.k_max).collect()
    }

    /// Positivity of every numeric knob and presence of the seed where used.
    pub fn validate(&self) -> Result<()> {
        let needs_seed = matches!(self.command.as_str(), "simulate" | "estimate" | "verify" | "sweep");
        if needs_seed && self.seed.is_none() {
            return Err(Error::validation("seed", "--seed is required"));
        }
        let needs_spec = self.command != "report";
        if needs_spec && self.spec.is_none() {
            return Err(Error::validation("spec", "--spec is required"));
        }
        if self.k_min == 0 || self.k_max < self.k_min {
            return Err(Error::validation("k", format!("need 1 ≤ A ≤ B, got {}..{}", self.k_min, self.k_max)));
        }
        for (name, v) in [("samples", self.samples), ("replicates", self.replicates)] {
            if v == 0 {
                return Err(Error::validation(name, "must be positive"));
            }
        }
        for (name, v) in [("grid", self.grid), ("s_max", self.s_max), ("i_max", self.i_max)] {
            if v == Some(0) {
                return Err(Error::validation(name, "must be positive"));
            }
        }
        if self.grid == Some(1) {
            return Err(Error::validation("grid", "needs at least two cells per coordinate"));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::validation("tail_tol", format!("must lie in (0, 1), got {}", self.tail_tol)));
        }
        if let Some(d) = self.delta_tilde {
            if !(d > 0.0 && d < 1.0) {
                return Err(Error::validation("delta_tilde", format!("must lie in (0, 1), got {d}")));
            }
        }
        self.variant.parse::<BoundVariant>()?;
        parse_anchor(&self.anchor)?;
        for s in &self.suites {
            s.parse::<Suite>()?;
        }
        Ok(())
    }

    fn process(&self) -> Result<ProcessSpec> {
        self.spec
            .as_ref()
            .ok_or_else(|| Error::validation("spec", "--spec is required"))?
            .to_spec()
    }

    fn innovation_model(&self) -> Result<InnovationModel> {
        InnovationModel::parse(&self.innovation)
    }

    fn bound_options(&self) -> Result<BoundOptions> {
        Ok(BoundOptions {
            variant: self.variant.parse()?,
            t: self.t,
            delta_tilde: self.delta_tilde,
            archinf: ArchInfBoundConfig {
                s_max: self.s_max,
                i_max: self.i_max,
                literal_two_mix: self.literal_two_mix,
                ..ArchInfBoundConfig::default()
            },
        })
    }

    fn estimate_config(&self, spec: &ProcessSpec) -> Result<EstimateConfig> {
        let mut c = EstimateConfig::for_spec(spec);
        c.anchor = parse_anchor(&self.anchor)?;
        if let Some(m) = self.grid {
            c.m = m;
        }
        if let Some(r) = self.r_left {
            c.r_left = r;
        }
        if let Some(r) = self.r_right {
            c.r_right = r;
        }
        Ok(c)
    }
}

fn parse_anchor(s: &str) -> Result<Anchor> {
    if s == "pooled" {
        return Ok(Anchor::Pooled);
    }
    s.parse::<i64>()
        .map(Anchor::Fixed)
        .map_err(|_| Error::validation("anchor", format!("expected `pooled` or an integer time, got `{s}`")))
}

/// Parses `A..B`, `A..=B` or a single `K` (meaning 1..=K).
pub fn parse_lag_range(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::validation("k", format!("expected A..B or K, got `{s}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => (1, num(s)?),
    };
    if a == 0 || b < a {
        return Err(bad());
    }
    Ok((a, b))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn resolve_out(flag: Option<&Path>) -> String {
    if let Ok(env) = std::env::var(OUT_ENV) {
        if !env.is_empty() {
            return env;
        }
    }
    flag.map(|p| p.display().to_string())
        .unwrap_or_else(|| DEFAULT_OUT.to_string())
}

fn resolve(command: &str, suites: Vec<String>, a: &RunArgs) -> Result<ExperimentConfig> {
    let out = resolve_out(a.out.as_deref());
    let workers = a.workers.unwrap_or_else(default_workers);
    if workers == 0 {
        return Err(Error::validation("workers", "must be positive"));
    }
    if let Some(path) = &a.config {
        let mut c = ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?;
        if c.command != command {
            return Err(Error::validation(
                "config",
                format!("file is for `{}`, not `{command}`", c.command),
            ));
        }
        c.out = out;
        c.workers = workers;
        return Ok(c);
    }
    let (spec_path, spec_sha256, spec) = match &a.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let spec = SpecFile::parse(&text)?;
            (Some(path.display().to_string()), Some(sha256_hex(text.as_bytes())), Some(spec))
        }
        None => (None, None, None),
    };
    let innovation = a
        .innovation
        .clone()
        .or_else(|| spec.as_ref().and_then(|s| s.innovation.clone()))
        .unwrap_or_else(|| "exponential".to_string());
    let (k_min, k_max) = match &a.k {
        Some(s) => parse_lag_range(s)?,
        None => (1, DEFAULT_K_MAX),
    };
    let default_samples = if command == "simulate" {
        DEFAULT_SIMULATE_SAMPLES
    } else {
        DEFAULT_SAMPLES
    };
    let c = ExperimentConfig {
        command: command.to_string(),
        suites,
        spec_path,
        spec_sha256,
        spec,
        innovation,
        seed: a.seed,
        k_min,
        k_max,
        samples: a.samples.unwrap_or(default_samples),
        replicates: a.replicates.unwrap_or(DEFAULT_REPLICATES),
        grid: a.grid,
        r_left: a.r_left,
        r_right: a.r_right,
        anchor: a.anchor.clone().unwrap_or_else(|| "pooled".to_string()),
        t: a.t.unwrap_or(0),
        delta_tilde: a.delta_tilde,
        variant: if a.tight { "tight" } else { "packaged" }.to_string(),
        literal_two_mix: a.literal_two_mix,
        s_max: a.s_max,
        i_max: a.i_max,
        tail_tol: a.tail_tol.unwrap_or(DEFAULT_TAIL_TOL),
        truncation_lag: a.truncation_lag,
        burn_in: a.burn_in,
        bounds: !a.no_bounds,
        estimates: !a.no_estimates,
        input: a.input.as_ref().map(|p| p.display().to_string()),
        out,
        workers,
    };
    c.validate()?;
    Ok(c)
}

/// Outcome of a command: files written and rows of failed checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
}

/// Simulates the ensemble described by `config`: `replicates` paths of
/// length ⌈samples / replicates⌉.
pub fn simulate_ensemble(config: &ExperimentConfig) -> Result<PathEnsemble> {
    let spec = config.process()?;
    let innovation = config.innovation_model()?;
    let seed = config.seed.ok_or_else(|| Error::validation("seed", "--seed is required"))?;
    let len = config.samples.div_ceil(config.replicates);
    match &spec {
        ProcessSpec::TvArch(s) => simulate_tvarch(
            s,
            &innovation,
            config.t..config.t + len as i64,
            config.replicates,
            seed,
            config.burn_in,
        ),
        ProcessSpec::ArchInf(s) => simulate_archinf(
            s,
            &innovation,
            len,
            config.replicates,
            seed,
            ArchInfSimOptions {
                burn_in: config.burn_in,
                truncation_lag: config.truncation_lag,
                tail_tol: config.tail_tol,
            },
        ),
    }
}

pub fn compute_bounds(config: &ExperimentConfig) -> Result<BoundCurve> {
    bound_curve(
        &config.process()?,
        &config.innovation_model()?,
        &config.lags(),
        &config.bound_options()?,
    )
}

pub fn compute_estimates(config: &ExperimentConfig) -> Result<EstimateCurve> {
    let spec = config.process()?;
    let ensemble = simulate_ensemble(config)?;
    estimate_curve(&ensemble, &config.lags(), &config.estimate_config(&spec)?)
}

fn out_dir(config: &ExperimentConfig) -> PathBuf {
    PathBuf::from(&config.out)
}

fn write_config(config: &ExperimentConfig, hash: &str) -> Result<PathBuf> {
    output::write_json(
        &out_dir(config),
        &format!("{}.config.json", config.command),
        hash,
        &config.canonical(),
    )
}

fn cmd_simulate(config: &ExperimentConfig) -> Result<RunOutcome> {
    let hash = config.hash();
    let ens = simulate_ensemble(config)?;
    let mut csv = Csv::new(&hash, "simulate", &["replicate", "t", "x"]);
    for (r, path) in ens.paths.iter().enumerate() {
        for (i, x) in path.iter().enumerate() {
            csv.row(&[r.to_string(), (ens.t_start + i as i64).to_string(), fmt_f64(*x)]);
        }
    }
    Ok(RunOutcome {
        files: vec![csv.write(&out_dir(config), "paths.csv")?, write_config(config, &hash)?],
        failures: Vec::new(),
    })
}

pub fn bound_csv(curve: &BoundCurve, hash: &str) -> Csv {
    let mut csv = Csv::new(
        hash,
        "bound",
        &["k", "alpha_bound", "beta_bound", "twomix_bound", "tight_alpha", "rate_class"],
    );
    let label = curve.rate_class.map(|r| r.to_string()).unwrap_or_default();
    for (i, k) in curve.lags.iter().enumerate() {
        csv.row(&[
            k.to_string(),
            fmt_f64(curve.alpha_bound[i]),
            fmt_f64(curve.beta_bound[i]),
            fmt_f64(curve.twomix_bound[i]),
            fmt_f64(curve.tight_alpha[i]),
            label.clone(),
        ]);
    }
    csv
}

fn cmd_bound(config: &ExperimentConfig) -> Result<RunOutcome> {
    let hash = config.hash();
    let curve = compute_bounds(config)?;
    let dir = out_dir(config);
    let sidecar = serde_json::json!({
        "constants": curve.constants,
        "rate_class": curve.rate_class.map(|r| r.to_string()),
        "monotone_from": curve.monotone_from,
    });
    Ok(RunOutcome {
        files: vec![
            bound_csv(&curve, &hash).write(&dir, "bound.csv")?,
            output::write_json(&dir, "bound_constants.json", &hash, &sidecar)?,
            write_config(config, &hash)?,
        ],
        failures: Vec::new(),
    })
}

pub fn estimate_csv(curve: &EstimateCurve, hash: &str) -> Csv {
    let mut csv = Csv::new(
        hash,
        "estimate",
        &[
            "k", "alpha_hat", "beta_hat", "twomix_hat", "se_alpha", "se_beta", "se_twomix", "m", "r_left", "r_right",
            "n", "exact_flag",
        ],
    );
    for (i, k) in curve.lags.iter().enumerate() {
        csv.row(&[
            k.to_string(),
            fmt_f64(curve.alpha_hat[i]),
            fmt_f64(curve.beta_hat[i]),
            fmt_f64(curve.twomix_hat[i]),
            fmt_f64(curve.se_alpha[i]),
            fmt_f64(curve.se_beta[i]),
            fmt_f64(curve.se_twomix[i]),
            curve.m.to_string(),
            curve.r_left.to_string(),
            curve.r_right.to_string(),
            curve.n[i].to_string(),
            curve.exact[i].to_string(),
        ]);
    }
    csv
}

fn cmd_estimate(config: &ExperimentConfig) -> Result<RunOutcome> {
    let hash = config.hash();
    let curve = compute_estimates(config)?;
    Ok(RunOutcome {
        files: vec![
            estimate_csv(&curve, &hash).write(&out_dir(config), "estimate.csv")?,
            write_config(config, &hash)?,
        ],
        failures: Vec::new(),
    })
}

fn cmd_verify(config: &ExperimentConfig) -> Result<RunOutcome> {
    let hash = config.hash();
    let spec = config.process()?;
    let innovation = config.innovation_model()?;
    let seed = config.seed.ok_or_else(|| Error::validation("seed", "--seed is required"))?;
    let suites: Vec<Suite> = if config.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        config.suites.iter().map(|s| s.parse()).collect::<Result<_>>()?
    };
    let mut csv = Csv::new(&hash, "verify", &["suite", "check", "value", "tolerance", "pass"]);
    let mut failures = Vec::new();
    for suite in suites {
        for r in run_suite(suite, &spec, &innovation, seed)? {
            let fields = [
                r.suite.to_string(),
                r.check.clone(),
                fmt_f64(r.value),
                fmt_f64(r.tolerance),
                r.passed().to_string(),
            ];
            if !r.passed() {
                failures.push(fields.join(","));
            }
            csv.row(&fields);
        }
    }
    Ok(RunOutcome {
        files: vec![csv.write(&out_dir(config), "verify.csv")?, write_config(config, &hash)?],
        failures,
    })
}

/// One merged row of `sweep.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub estimate: Option<f64>,
    pub estimate_se: Option<f64>,
    pub bound: Option<f64>,
}

impl SweepRow {
    /// estimate − 3·SE ≤ bound, when both parts are present.
    pub fn dominated(&self) -> Option<bool> {
        match (self.estimate, self.bound) {
            (Some(e), Some(b)) => Some(e - 3.0 * self.estimate_se.filter(|s| s.is_finite()).unwrap_or(0.0) <= b),
            _ => None,
        }
    }
}

/// α̂ against the α bound per lag.
pub fn sweep_rows(lags: &[usize], estimates: Option<&EstimateCurve>, bounds: Option<&BoundCurve>) -> Vec<SweepRow> {
    lags.iter()
        .enumerate()
        .map(|(i, &k)| SweepRow {
            k,
            estimate: estimates.map(|e| e.alpha_hat[i]),
            estimate_se: estimates.map(|e| e.se_alpha[i]),
            bound: bounds.map(|b| b.alpha_bound[i]),
        })
        .collect()
}

fn cmd_sweep(config: &ExperimentConfig) -> Result<RunOutcome> {
    let hash = config.hash();
    let bounds = if config.bounds { Some(compute_bounds(config)?) } else { None };
    let estimates = if config.estimates {
        Some(compute_estimates(config)?)
    } else {
        None
    };
    let rows = sweep_rows(&config.lags(), estimates.as_ref(), bounds.as_ref());
    let mut csv = Csv::new(&hash, "sweep", &["k", "estimate", "estimate_se", "bound", "dominated"]);
    let mut failures = Vec::new();
    for r in &rows {
        let fields = [
            r.k.to_string(),
            fmt_opt(r.estimate),
            fmt_opt(r.estimate_se),
            fmt_opt(r.bound),
            r.dominated().map(|d| d.to_string()).unwrap_or_default(),
        ];
        if r.dominated() == Some(false) {
            failures.push(fields.join(","));
        }
        csv.row(&fields);
    }
    let dir = out_dir(config);
    let mut files = vec![csv.write(&dir, "sweep.csv")?];
    if let Some(b) = &bounds {
        files.push(bound_csv(b, &hash).write(&dir, "bound.csv")?);
    }
    if let Some(e) = &estimates {
        files.push(estimate_csv(e, &hash).write(&dir, "estimate.csv")?);
    }
    files.push(write_config(config, &hash)?);
    Ok(RunOutcome { files, failures })
}

/// Parses a sweep CSV, returning the source config hash and its rows.
pub fn read_sweep(text: &str) -> Result<(Option<String>, Vec<SweepRow>)> {
    let mut hash = None;
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (n, line) in text.lines().enumerate() {
        if let Some(c) = line.strip_prefix('#') {
            if let Some(h) = c.trim().strip_prefix("config_hash=") {
                hash = Some(h.to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            if line != "k,estimate,estimate_se,bound,dominated" {
                return Err(Error::validation("input", format!("line {}: not a sweep header", n + 1)));
            }
            header_seen = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(Error::validation("input", format!("line {}: expected 5 fields", n + 1)));
        }
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| Error::validation("input", format!("line {}: bad number `{s}`", n + 1)))
            }
        };
        rows.push(SweepRow {
            k: f[0]
                .parse()
                .map_err(|_| Error::validation("input", format!("line {}: bad lag `{}`", n + 1, f[0])))?,
            estimate: opt(f[1])?,
            estimate_se: opt(f[2])?,
            bound: opt(f[3])?,
        });
    }
    if !header_seen {
        return Err(Error::validation("input", "empty sweep file"));
    }
    Ok((hash, rows))
}

fn fit_line(label: &str, lags: &[usize], values: &[Option<f64>]) -> String {
    let pts: Vec<(usize, f64)> = lags
        .iter()
        .zip(values)
        .filter_map(|(&k, v)| v.filter(|x| *x > 0.0).map(|x| (k, x)))
        .collect();
    if pts.len() < 2 {
        return format!("{label} decay fit: not enough positive values\n");
    }
    let ks: Vec<usize> = pts.iter().map(|p| p.0).collect();
    let vs: Vec<f64> = pts.iter().map(|p| p.1).collect();
    match decay_fit(&ks, &vs, ks[0]..=ks[ks.len() - 1]) {
        Ok(f) => {
            let class = match f.class {
                FitClass::Geometric { ratio } => format!("geometric(ratio {})", fmt_f64(ratio)),
                FitClass::Polynomial { exponent } => format!("polynomial(exponent {})", fmt_f64(exponent)),
            };
            format!("{label} decay fit: {class}, r^2 {}\n", fmt_f64(f.r_squared))
        }
        Err(e) => format!("{label} decay fit: {e}\n"),
    }
}

/// Plain-text summary of a sweep.
pub fn render_report(source_hash: Option<&str>, rows: &[SweepRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "source_config_hash: {}", source_hash.unwrap_or("unknown"));
    let _ = writeln!(s, "lags: {}", rows.len());
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        let _ = writeln!(s, "lag range: {}..{}", first.k, last.k);
    }
    let est: Vec<f64> = rows.iter().filter_map(|r| r.estimate).collect();
    let bnd: Vec<f64> = rows.iter().filter_map(|r| r.bound).collect();
    if !est.is_empty() {
        let _ = writeln!(s, "estimate max: {}", fmt_f64(est.iter().copied().fold(f64::MIN, f64::max)));
    }
    if !bnd.is_empty() {
        let _ = writeln!(s, "bound min: {}", fmt_f64(bnd.iter().copied().fold(f64::MAX, f64::min)));
    }
    let judged: Vec<bool> = rows.iter().filter_map(SweepRow::dominated).collect();
    if !judged.is_empty() {
        let _ = writeln!(
            s,
            "dominated: {} of {}",
            judged.iter().filter(|d| **d).count(),
            judged.len()
        );
        for r in rows.iter().filter(|r| r.dominated() == Some(false)) {
            let _ = writeln!(s, "  not dominated at k={}", r.k);
        }
    }
    let lags: Vec<usize> = rows.iter().map(|r| r.k).collect();
    s.push_str(&fit_line("estimate", &lags, &rows.iter().map(|r| r.estimate).collect::<Vec<_>>()));
    s.push_str(&fit_line("bound", &lags, &rows.iter().map(|r| r.bound).collect::<Vec<_>>()));
    s
}

fn cmd_report(config: &ExperimentConfig) -> Result<RunOutcome> {
    let hash = config.hash();
    let input = config
        .input
        .clone()
        .map(PathBuf::from)
        .unwrap_or_else(|| out_dir(config).join("sweep.csv"));
    let (source, rows) = read_sweep(&std::fs::read_to_string(&input)?)?;
    let mut text = format!("# config_hash={hash}\n");
    text.push_str(&render_report(source.as_deref(), &rows));
    print!("{text}");
    Ok(RunOutcome {
        files: vec![output::write_file(&out_dir(config), "report.txt", &text)?],
        failures: Vec::new(),
    })
}

/// Runs an already resolved config on its worker pool.
pub fn execute(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::validation("workers", e.to_string()))?;
    pool.install(|| match config.command.as_str() {
        "simulate" => cmd_simulate(config),
        "bound" => cmd_bound(config),
        "estimate" => cmd_estimate(config),
        "verify" => cmd_verify(config),
        "sweep" => cmd_sweep(config),
        "report" => cmd_report(config),
        other => Err(Error::validation("command", format!("unknown command `{other}`"))),
    })
}

/// Exit code for an error: 2 for bad input, 1 for failed computations.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Validation { .. } | Error::Json(_) | Error::AssumptionViolated { .. } | Error::Io(_) => 2,
        _ => 1,
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code: 0 when every check passes, 1 on failed checks, 2 on usage or
/// input errors.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let resolved = match &cli.command {
        Command::Simulate(a) => resolve("simulate", Vec::new(), a),
        Command::Bound(a) => resolve("bound", Vec::new(), a),
        Command::Estimate(a) => resolve("estimate", Vec::new(), a),
        Command::Verify { suites, args } => resolve("verify", suites.clone(), args),
        Command::Sweep(a) => resolve("sweep", Vec::new(), a),
        Command::Report(a) => resolve("report", Vec::new(), a),
    };
    let outcome = resolved.and_then(|c| execute(&c));
    match outcome {
        Ok(o) => {
            for f in &o.files {
                eprintln!("wrote {}", f.display());
            }
            if o.failures.is_empty() {
                0
            } else {
                eprintln!("failed rows:");
                for r in &o.failures {
                    eprintln!("  {r}");
                }
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
