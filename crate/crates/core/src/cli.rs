//! The `subsketch` experiment driver.
//!
//! Every subcommand writes one record: JSON (with `"schema": 1`) or CSV with a
//! header row. Exit codes: 0 success, 2 invalid flags or parameters, 1 runtime
//! failure. `SUBSKETCH_THREADS` caps the worker pool.

use crate::error::Error;
use crate::hardinstance::{recovery_experiment, HardInstanceTemplate, NoiseModel};
use crate::kernel::KernelFunction;
use crate::matrix::{condition_number, phi_norm, QueryMatrix};
use crate::median2d::build_l1_2d_sketch;
use crate::rng::RngStream;
use crate::sketches::{
    build_even_moment_sketch, build_gram_sketch, build_sampling_sketch, build_stable_sketch, compute_lewis_weights,
    SubspaceSketch, DEFAULT_ROW_CONSTANT,
};
use crate::spectrum::{binomial, fourier_spectrum};
use crate::tukey::TukeyEstimator;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "subsketch", version, about = "Subspace-sketch experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the record here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum Noise {
    Exact,
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum SketchKind {
    Gram,
    Even,
    Stable,
    Sampling,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues of a Boolean-cube kernel matrix by character weight.
    Spectrum(SpectrumArgs),
    /// Build one planted instance and report its invariants.
    HardInstance(HardInstanceArgs),
    /// Plant-and-decode trials under a noise model.
    Recover(RecoverArgs),
    /// Accuracy and size of a subspace sketch on random matrices.
    SketchBench(SketchBenchArgs),
    /// Mollified Tukey estimator against the exact scan.
    TukeyBench(TukeyBenchArgs),
    /// 2-D ℓ₁ sketch accuracy and coreset sizes.
    Median2dBench(Median2dBenchArgs),
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// power, zero, log, tukey, huber, fair, cauchy, l1l2, mollified_tukey
    #[arg(long, default_value = "power")]
    kernel: String,
}

#[derive(Debug, Args)]
struct HardInstanceArgs {
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write A in the "n d grain" text format.
    #[arg(long)]
    matrix_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RecoverArgs {
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long, value_enum, default_value_t = Noise::Exact)]
    noise: Noise,
    /// Multiplicative ε; defaults to 100× the decodable threshold.
    #[arg(long)]
    eps: Option<f64>,
    /// Additive magnitude; defaults to the decodable threshold 0.1·σ√(N/2^d).
    #[arg(long)]
    magnitude: Option<f64>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct SketchBenchArgs {
    #[arg(long, value_enum, default_value_t = SketchKind::Stable)]
    sketch: SketchKind,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    d: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rows r = ⌈c/ε²⌉ of the stable sketch.
    #[arg(long, default_value_t = DEFAULT_ROW_CONSTANT)]
    c: f64,
    /// Sample count of the sampling sketch.
    #[arg(long, default_value_t = 300)]
    m: usize,
    /// Use this matrix (text format) for every trial instead of random ones.
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TukeyBenchArgs {
    /// Number of small entries.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Number of large entries.
    #[arg(long, default_value_t = 1000)]
    spikes: usize,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct Median2dBenchArgs {
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of query directions.
    #[arg(long, default_value_t = 1000)]
    grid: usize,
}

/// A finished experiment: JSON fields plus a CSV view of the same data.
struct Record {
    fields: Map<String, Value>,
    csv_header: Vec<String>,
    csv_rows: Vec<Vec<String>>,
}

impl Record {
    /// Single-row CSV over the given scalar fields.
    fn flat(fields: Map<String, Value>, columns: &[&str]) -> Self {
        let row = columns.iter().map(|c| csv_cell(fields.get(*c))).collect();
        Record {
            csv_header: columns.iter().map(|c| c.to_string()).collect(),
            csv_rows: vec![row],
            fields,
        }
    }
}

fn csv_cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::DimensionMismatch { .. } | Error::Parse { .. } => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("records are JSON objects"),
    }
}

/// Runs the CLI on `argv` (including the program name), printing to stdout.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run_with_output(argv, &mut lock)
}

/// [`run`] with an explicit sink for the record.
pub fn run_with_output<I, T>(argv: I, sink: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(sink, "{e}");
            } else {
                eprintln!("{e}");
            }
            return code;
        }
    };
    let threads = std::env::var("SUBSKETCH_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 1;
        }
    };
    let started = Instant::now();
    let outcome = pool.install(|| dispatch(&cli));
    match outcome.and_then(|rec| emit(&cli, rec, started.elapsed().as_secs_f64() * 1e3, sink)) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(&'static str, Value, Record), Failure> {
    match &cli.command {
        Command::Spectrum(a) => Ok(("spectrum", json!({"d": a.d, "p": a.p, "tau": a.tau, "kernel": a.kernel}), spectrum(a)?)),
        Command::HardInstance(a) => Ok(("hard-instance", json!({"d": a.d, "p": a.p, "seed": a.seed}), hard_instance(a)?)),
        Command::Recover(a) => Ok((
            "recover",
            json!({"d": a.d, "p": a.p, "noise": format!("{:?}", a.noise).to_lowercase(), "eps": a.eps,
                   "magnitude": a.magnitude, "trials": a.trials, "seed": a.seed}),
            recover(a)?,
        )),
        Command::SketchBench(a) => Ok((
            "sketch-bench",
            json!({"sketch": format!("{:?}", a.sketch).to_lowercase(), "p": a.p, "eps": a.eps, "n": a.n, "d": a.d,
                   "trials": a.trials, "seed": a.seed, "c": a.c, "m": a.m,
                   "matrix": a.matrix.as_ref().map(|p| p.display().to_string())}),
            sketch_bench(a)?,
        )),
        Command::TukeyBench(a) => Ok((
            "tukey-bench",
            json!({"n": a.n, "tau": a.tau, "eps": a.eps, "spikes": a.spikes, "trials": a.trials, "seed": a.seed}),
            tukey_bench(a)?,
        )),
        Command::Median2dBench(a) => Ok((
            "median2d-bench",
            json!({"n": a.n, "eps": a.eps, "seed": a.seed, "grid": a.grid}),
            median2d_bench(a)?,
        )),
    }
}

fn emit(cli: &Cli, (name, params, rec): (&'static str, Value, Record), wall_ms: f64, sink: &mut dyn Write) -> Result<(), Failure> {
    let default_format = if name == "spectrum" { Format::Csv } else { Format::Json };
    let text = match cli.format.unwrap_or(default_format) {
        Format::Json => {
            let mut out = Map::new();
            out.insert("schema".into(), json!(SCHEMA_VERSION));
            out.insert("subcommand".into(), json!(name));
            out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            out.insert("seed".into(), params.get("seed").cloned().unwrap_or(Value::Null));
            out.insert("params".into(), params);
            out.extend(rec.fields);
            out.insert("wall_clock_ms".into(), json!(wall_ms));
            let mut s = serde_json::to_string_pretty(&Value::Object(out)).map_err(|e| Failure::Runtime(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = rec.csv_header.join(",");
            s.push('\n');
            for row in &rec.csv_rows {
                s.push_str(&row.join(","));
                s.push('\n');
            }
            s
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => sink.write_all(text.as_bytes()),
    };
    written.map_err(|e| Failure::Runtime(format!("cannot write output: {e}")))
}

fn spectrum(a: &SpectrumArgs) -> Result<Record, Failure> {
    if a.d == 0 || a.d > 24 {
        return Err(usage(format!("--d must lie in 1..=24, got {}", a.d)));
    }
    let kernel = KernelFunction::parse(&a.kernel, a.p, a.tau)?;
    let spec = fourier_spectrum(&kernel, a.d)?;
    let p = a.p.map(|p| p.to_string()).unwrap_or_default();
    let rows: Vec<Vec<String>> = spec
        .by_weight
        .iter()
        .enumerate()
        .map(|(w, c)| {
            vec![
                a.d.to_string(),
                kernel.name().to_string(),
                p.clone(),
                w.to_string(),
                c.to_string(),
                binomial(a.d, w).to_string(),
            ]
        })
        .collect();
    let weights: Vec<Value> = spec
        .by_weight
        .iter()
        .enumerate()
        .map(|(w, c)| json!({"weight": w, "coefficient": c, "multiplicity": binomial(a.d, w) as u64}))
        .collect();
    Ok(Record {
        fields: object(json!({
            "d": a.d, "kernel": kernel.name(), "p": a.p, "weights": weights,
            "lambda0": spec.lambda0, "lambda0_multiplicity": spec.multiplicity,
        })),
        csv_header: ["d", "kernel", "p", "weight", "coefficient", "multiplicity"].map(String::from).to_vec(),
        csv_rows: rows,
    })
}

fn hard_instance(a: &HardInstanceArgs) -> Result<Record, Failure> {
    let template = HardInstanceTemplate::new(a.d, a.p)?;
    let inst = template.instantiate(&mut RngStream::new(a.seed, "hard-instance").rng())?;
    let report = inst.check();
    if let Some(path) = &a.matrix_out {
        std::fs::write(path, inst.a.to_text()).map_err(|e| Failure::Runtime(format!("cannot write matrix: {e}")))?;
    }
    let fields = object(json!({
        "d": a.d, "p": a.p, "lambda0": template.lambda0(), "multiplicity": template.spectrum.multiplicity,
        "level_sigma": template.level.sigma, "level_multiplicity": template.level.multiplicity,
        "bits": template.bit_indices().len(), "shift": inst.shift, "grain": inst.grain, "row_sum": inst.row_sum,
        "kappa": condition_number(&inst.a), "invariants_ok": report.ok,
        "min_ytilde_p": report.min_ytilde_p, "max_ytilde_p": report.max_ytilde_p,
        "max_rounding_error": report.max_rounding_error, "x_inf": report.x_inf,
        "max_query_value": report.max_query_value, "query_bound": report.query_bound,
        "resamples": inst.resamples,
    }));
    Ok(Record::flat(
        fields,
        &["d", "p", "lambda0", "multiplicity", "bits", "kappa", "invariants_ok", "max_rounding_error", "x_inf"],
    ))
}

fn recover(a: &RecoverArgs) -> Result<Record, Failure> {
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let template = HardInstanceTemplate::new(a.d, a.p)?;
    let noise = match a.noise {
        Noise::Exact => NoiseModel::Exact,
        Noise::Additive => NoiseModel::AdditiveAdversarial {
            magnitude: a.magnitude.unwrap_or_else(|| template.additive_threshold()),
        },
        Noise::Multiplicative => NoiseModel::Multiplicative {
            epsilon: a.eps.unwrap_or_else(|| 100.0 * template.multiplicative_threshold()),
        },
    };
    match noise {
        NoiseModel::AdditiveAdversarial { magnitude } if !(magnitude >= 0.0) => {
            return Err(usage("--magnitude must be non-negative"))
        }
        NoiseModel::Multiplicative { epsilon } if !(epsilon >= 0.0) => return Err(usage("--eps must be non-negative")),
        _ => {}
    }
    let report = recovery_experiment(&template, noise, a.trials, &RngStream::new(a.seed, "recover"))?;
    let noise_parameter = match noise {
        NoiseModel::Exact => Value::Null,
        NoiseModel::AdditiveAdversarial { magnitude } => json!(magnitude),
        NoiseModel::Multiplicative { epsilon } => json!(epsilon),
    };
    let fields = object(json!({
        "d": report.d, "p": report.p, "noise_model": noise.name(), "noise_parameter": noise_parameter,
        "trials": report.trials, "per_bit_success_rate": report.per_bit_success_rate,
        "lambda0": report.lambda0, "multiplicity": report.multiplicity, "kappa": report.kappa,
        "bits_per_trial": report.bits_per_trial, "bits_correct": report.bits_correct,
        "level_sigma": report.level_sigma, "level_multiplicity": report.level_multiplicity,
        "row_norm": report.row_norm, "additive_threshold": report.additive_threshold,
        "multiplicative_threshold": report.multiplicative_threshold, "resamples": report.resamples,
    }));
    Ok(Record::flat(
        fields,
        &["d", "p", "noise_model", "trials", "per_bit_success_rate", "lambda0", "multiplicity", "kappa"],
    ))
}

/// n × d matrix of uniform entries in [−1, 1] on a 10⁻³ grid.
pub fn random_matrix<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> QueryMatrix {
    let ints = (0..n * d).map(|_| rng.random_range(-1000..=1000)).collect();
    QueryMatrix::from_integers(n, d, 1e-3, ints).expect("shape is valid")
}

fn sketch_bench(a: &SketchBenchArgs) -> Result<Record, Failure> {
    if a.trials == 0 || a.n == 0 || a.d == 0 {
        return Err(usage("--trials, --n and --d must be at least 1"));
    }
    if !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1), got {}", a.eps)));
    }
    let fixed = match &a.matrix {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            Some(QueryMatrix::parse_text(&text)?)
        }
        None => None,
    };
    let p = a.p.unwrap_or(match a.sketch {
        SketchKind::Gram => 2.0,
        SketchKind::Even => 4.0,
        SketchKind::Stable | SketchKind::Sampling => 1.0,
    });
    if a.sketch == SketchKind::Gram && p != 2.0 {
        return Err(usage("the gram sketch only answers p = 2"));
    }
    let stream = RngStream::new(a.seed, "sketch-bench");
    let trials: Vec<(f64, bool, u64)> = (0..a.trials)
        .into_par_iter()
        .map(|t| -> Result<(f64, bool, u64), Failure> {
            let mut rng = stream.trial(t as u64);
            let m = match &fixed {
                Some(m) => m.clone(),
                None => random_matrix(a.n, a.d, &mut rng),
            };
            let sketch: Box<dyn SubspaceSketch> = match a.sketch {
                SketchKind::Gram => Box::new(build_gram_sketch(&m)),
                SketchKind::Even => {
                    if p.fract() != 0.0 {
                        return Err(usage("the even sketch needs p in {2, 4, 6}"));
                    }
                    Box::new(build_even_moment_sketch(&m, p as u32)?)
                }
                SketchKind::Stable => Box::new(build_stable_sketch(&m, p, a.eps, a.c, &mut rng)?),
                SketchKind::Sampling => {
                    let w = compute_lewis_weights(&m, p)?;
                    Box::new(build_sampling_sketch(&m, &w, a.m, &mut rng)?)
                }
            };
            let x: Vec<f64> = (0..m.d()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let truth = phi_norm(&m, &x, &KernelFunction::power(p))?;
            let est = sketch.query(&x)?;
            let rel = if truth > 0.0 { (est - truth).abs() / truth } else { est.abs() };
            Ok((rel, rel <= a.eps, sketch.size_bits()))
        })
        .collect::<Result<_, _>>()?;
    let coverage = trials.iter().filter(|t| t.1).count() as f64 / trials.len() as f64;
    let mean_rel_err = trials.iter().map(|t| t.0).sum::<f64>() / trials.len() as f64;
    let kind = format!("{:?}", a.sketch).to_lowercase();
    let fields = object(json!({
        "sketch": kind,
        "params": {"p": p, "eps": a.eps, "n": fixed.as_ref().map_or(a.n, |m| m.n()), "d": fixed.as_ref().map_or(a.d, |m| m.d()),
                   "trials": a.trials, "c": a.c, "m": a.m},
        "size_bits": trials[0].2,
        "coverage_rate": coverage,
        "mean_rel_err": mean_rel_err,
    }));
    Ok(Record::flat(fields, &["sketch", "size_bits", "coverage_rate", "mean_rel_err"]))
}

/// `spikes` entries of magnitude in [2τ, 10τ] followed by `n` entries in [−τ/2, τ/2].
pub fn mixed_vector<R: Rng + ?Sized>(n: usize, spikes: usize, tau: f64, rng: &mut R) -> Vec<f64> {
    let mut x = Vec::with_capacity(n + spikes);
    for _ in 0..spikes {
        let v = rng.random_range(2.0 * tau..10.0 * tau);
        x.push(if rng.random::<bool>() { v } else { -v });
    }
    for _ in 0..n {
        x.push(rng.random_range(-0.5 * tau..0.5 * tau));
    }
    x
}

fn tukey_bench(a: &TukeyBenchArgs) -> Result<Record, Failure> {
    if a.trials == 0 || a.n + a.spikes == 0 {
        return Err(usage("--trials must be at least 1 and the vector non-empty"));
    }
    let estimator = TukeyEstimator::new(a.tau, a.eps)?;
    let stream = RngStream::new(a.seed, "tukey-bench");
    let x = mixed_vector(a.n, a.spikes, a.tau, &mut stream.child("data").rng());
    let runs: Vec<_> = (0..a.trials)
        .into_par_iter()
        .map(|t| estimator.estimate(&x, &mut stream.trial(t as u64)))
        .collect();
    let first = &runs[0];
    let success = runs.iter().filter(|r| r.rel_err <= 3.0 * a.eps).count() as f64 / runs.len() as f64;
    let per_trial: Vec<Value> = runs
        .iter()
        .map(|r| json!({"estimate": r.estimate, "rel_err": r.rel_err, "S1": r.s1, "S2": r.s2, "S3": r.s3, "sampled": r.sampled}))
        .collect();
    let fields = object(json!({
        "exact": first.exact, "estimate": first.estimate, "rel_err": first.rel_err, "r": first.r,
        "beta": first.beta, "degree": first.degree, "S1": first.s1, "S2": first.s2, "S3": first.s3,
        "oracle_assisted": first.oracle_assisted, "success_rate": success, "per_trial": per_trial,
    }));
    Ok(Record::flat(
        fields,
        &["exact", "estimate", "rel_err", "r", "beta", "degree", "S1", "S2", "S3", "success_rate"],
    ))
}

fn median2d_bench(a: &Median2dBenchArgs) -> Result<Record, Failure> {
    if a.n == 0 || a.grid == 0 {
        return Err(usage("--n and --grid must be at least 1"));
    }
    if !(a.eps > 0.0 && a.eps < 1.0) {
        return Err(usage(format!("--eps must lie in (0, 1), got {}", a.eps)));
    }
    let stream = RngStream::new(a.seed, "median2d-bench");
    let mut rng = stream.rng();
    let m = random_matrix(a.n, 2, &mut rng);
    let sketch = build_l1_2d_sketch(&m, a.eps)?;
    let l1 = KernelFunction::power(1.0);
    let mut max_rel: f64 = 0.0;
    for _ in 0..a.grid {
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let x = [theta.cos(), theta.sin()];
        let truth = phi_norm(&m, &x, &l1)?;
        if truth > 0.0 {
            max_rel = max_rel.max((sketch.query(x) - truth).abs() / truth);
        }
    }
    let log2n = (a.n.max(2) as f64).ln().powi(2);
    let k_plus = sketch.plus.len() as f64 * a.eps / log2n;
    let k_minus = sketch.minus.len() as f64 * a.eps / log2n;
    let fields = object(json!({
        "coreset_size_plus": sketch.plus.len(), "coreset_size_minus": sketch.minus.len(),
        "max_rel_err": max_rel, "K_observed": k_plus.max(k_minus), "size_bits": sketch.size_bits(),
    }));
    Ok(Record::flat(
        fields,
        &["coreset_size_plus", "coreset_size_minus", "max_rel_err", "K_observed"],
    ))
}
