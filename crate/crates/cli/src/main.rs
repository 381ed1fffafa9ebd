//! `mahler-lab`: command-line front end with a JSON-lines experiment log.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 a mathematical
//! assertion failed.

mod record;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use mahler_lab::bodies::{BodyDescription, LagrangianProduct, Slice};
use mahler_lab::capacity::{self, CapacityConfig};
use mahler_lab::crofton::{self, Polynomial, SignedSlice};
use mahler_lab::embedding::{self, EmbeddingProfile, GridConfig};
use mahler_lab::exact::{self, fmt_q, Q};
use mahler_lab::suites::{self, SuiteParams};
use mahler_lab::symplectic;
use mahler_lab::volume::{self, VolumeConfig};

use record::ExperimentRecord;

const SEED_ENV: &str = "MAHLER_LAB_SEED";
const LOG_ENV: &str = "MAHLER_LAB_LOG";
const DEFAULT_LOG: &str = "experiments.jsonl";

#[derive(Parser, Debug)]
#[command(name = "mahler-lab", version, about = "Mahler volumes, symplectic reductions and capacities at desk scale")]
struct Cli {
    /// JSON-lines log to append to [env: MAHLER_LAB_LOG, default ./experiments.jsonl].
    #[arg(long, global = true)]
    log: Option<PathBuf>,
    /// Skip the experiment log.
    #[arg(long, global = true)]
    no_log: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Volume of a body, exact when possible.
    Volume(BodyArgs),
    /// `vol K · vol K°` against `4^n/n!`.
    Mahler(MahlerArgs),
    /// Central hyperplane section `K ∩ u^⊥`.
    Section(SliceArgs),
    /// Orthogonal projection of `K` onto `u^⊥`.
    Project(SliceArgs),
    /// Linear symplectic reduction of `K × K°` along q-lines.
    Reduce(ReduceArgs),
    /// Estimate of the EHZ capacity by polygonal loops.
    Capacity(CapacityArgs),
    /// Crofton identity on a perturbed slice of the 3-sphere.
    Crofton(CroftonArgs),
    /// Coordinatewise embedding of a ball into `B_α × B_β`.
    Embed(EmbedArgs),
    /// Runs a named randomized battery.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Serialize)]
struct BodyArgs {
    /// Body description: a JSON file path or inline JSON.
    #[arg(long)]
    body: String,
    /// Monte Carlo samples when no exact method applies.
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct MahlerArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: BodyArgs,
    /// Confidence half-widths allowed below the bound for sampled volumes.
    #[arg(long, default_value_t = 3.0)]
    sigmas: f64,
}

#[derive(Args, Debug, Serialize)]
struct SliceArgs {
    #[command(flatten)]
    #[serde(flatten)]
    common: BodyArgs,
    /// Rational normal, comma separated (`1,-2,3/2`).
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    normal: Vector,
}

#[derive(Args, Debug, Serialize)]
struct ReduceArgs {
    /// `K`, or a `product` description giving both factors.
    #[arg(long)]
    body: String,
    /// Reduction lines in q-space, applied in order; repeat for iterated reduction.
    #[arg(long = "normal", required = true, value_parser = parse_vector, allow_hyphen_values = true)]
    normals: Vec<Vector>,
    /// Also check `vol S' ≥ (n/A) vol S` with this action (one normal, polytope `K`).
    #[arg(long, value_parser = parse_rational)]
    #[serde(serialize_with = "ser_opt_q")]
    action: Option<Q>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct CapacityArgs {
    #[arg(long)]
    body: String,
    /// Loop vertices.
    #[arg(long, default_value_t = 64)]
    points: usize,
    #[arg(long, default_value_t = 16)]
    starts: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict to loops with `γ(t + 1/2) = −γ(t)`.
    #[arg(long)]
    symmetric: bool,
    #[arg(long, default_value_t = 50_000)]
    max_iter: usize,
}

#[derive(Args, Debug, Serialize)]
struct CroftonArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    epsilon: f64,
    /// Odd polynomial in `p1, q1, p2, q2, …`, e.g. `q1*p2^2 - q2^3`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    g: String,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Circles sampled.
    #[arg(long, default_value = "1e5", value_parser = parse_count)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Absolute tolerance on top of the confidence interval.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long, default_value_t = 3.0)]
    sigmas: f64,
}

#[derive(Args, Debug, Serialize)]
struct EmbedArgs {
    #[arg(long)]
    alpha: f64,
    /// Smoothing exponent; omit with `--max` for the nonsmooth limit.
    #[arg(long, default_value_t = 8, conflicts_with = "max")]
    nexp: u32,
    /// Uses `4 max(|q|^α, |p|^β)` instead of the smoothed profile.
    #[arg(long)]
    max: bool,
    /// Number of planar factors `N` of `R^{2N}`.
    #[arg(long, default_value_t = 2)]
    copies: usize,
    /// Ball radius in units of `√(4/π)`; defaults to the certified radius.
    #[arg(long)]
    radius_factor: Option<f64>,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    samples: u64,
    #[arg(long)]
    seed: Option<u64>,
    /// Binary cache for the profile tables.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "1e6", value_parser = parse_count)]
    samples: u64,
    /// Comma-separated `p` values (sections-lp) or `α` values (embedding).
    #[arg(long, value_delimiter = ',', default_values_t = [1.5, 3.0, 6.0])]
    exponents: Vec<f64>,
    #[arg(long, default_value_t = 8)]
    nexp: u32,
    /// Largest entry of random integer normals.
    #[arg(long, default_value_t = 5)]
    range: i64,
}

/// Accepts integers and float notation such as `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("not a non-negative integer: {s:?}")),
    }
}

fn parse_rational(s: &str) -> Result<Q, String> {
    exact::parse_q(s).map_err(|e| e.to_string())
}

/// One rational vector per flag occurrence; a bare `Vec` would make clap
/// split it into several values.
#[derive(Clone, Debug)]
struct Vector(Vec<Q>);

impl Serialize for Vector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(fmt_q))
    }
}

fn parse_vector(s: &str) -> Result<Vector, String> {
    s.trim().trim_start_matches('[').trim_end_matches(']').split(',').map(parse_rational).collect::<Result<_, _>>().map(Vector)
}

fn ser_opt_q<S: serde::Serializer>(v: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&fmt_q(x)),
        None => s.serialize_none(),
    }
}

/// A usage or input error; exits with status 1.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// What a subcommand hands back for printing and logging.
struct Outcome {
    result: Value,
    pass: bool,
    body_hash: Option<String>,
}

struct LoadedBody {
    description: BodyDescription,
    hash: String,
}

fn load_body(arg: &str) -> Result<LoadedBody, Failure> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Failure(format!("cannot read body file {arg:?}: {e}")))?
    };
    let description = BodyDescription::from_json(&text)?;
    let hash = record::content_hash(&description.to_json());
    Ok(LoadedBody { description, hash })
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Failure(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable result")
}

fn run_volume(a: &BodyArgs, seed: u64) -> Result<Outcome, Failure> {
    let b = load_body(&a.body)?;
    let k = b.description.build()?;
    let r = volume::volume(&k, &VolumeConfig { samples: a.samples, seed })?;
    Ok(Outcome { result: json!({"dim": k.dim(), "kind": k.kind(), "volume": r}), pass: true, body_hash: Some(b.hash) })
}

fn run_mahler(a: &MahlerArgs, seed: u64) -> Result<Outcome, Failure> {
    let b = load_body(&a.common.body)?;
    let k = b.description.build()?;
    let r = volume::mahler_product(&k, &VolumeConfig { samples: a.common.samples, seed })?;
    let pass = r.respects_bound(a.sigmas);
    let mut result = to_value(&r);
    result["respects_bound"] = json!(pass);
    Ok(Outcome { result, pass, body_hash: Some(b.hash) })
}

fn slice_result(s: &Slice, cfg: &VolumeConfig) -> Result<Value, Failure> {
    let vol = volume::slice_volume(s, cfg)?;
    let basis: Vec<Vec<String>> = s.frame.basis().iter().map(|v| v.iter().map(fmt_q).collect()).collect();
    Ok(json!({
        "body": BodyDescription::of(&s.body),
        "dim": s.body.dim(),
        "degenerate": s.degenerate,
        "frame": {
            "normal": s.frame.normal().iter().map(fmt_q).collect::<Vec<_>>(),
            "pivot": s.frame.pivot(),
            "basis": basis,
        },
        "volume": vol,
    }))
}

fn run_slice(a: &SliceArgs, seed: u64, projection: bool) -> Result<Outcome, Failure> {
    let b = load_body(&a.common.body)?;
    let k = b.description.build()?;
    let s = if projection { k.hyperplane_projection(&a.normal.0)? } else { k.hyperplane_section(&a.normal.0)? };
    let result = slice_result(&s, &VolumeConfig { samples: a.common.samples, seed })?;
    Ok(Outcome { result, pass: true, body_hash: Some(b.hash) })
}

fn run_reduce(a: &ReduceArgs) -> Result<Outcome, Failure> {
    let b = load_body(&a.body)?;
    let (s, plain) = match &b.description {
        BodyDescription::Product { q, p } => {
            let base = q.build()?;
            let dual = match p {
                Some(p) => p.build()?,
                None => base.polar(),
            };
            (LagrangianProduct::from_parts(base, dual)?, None)
        }
        d => {
            let k = d.build()?;
            (LagrangianProduct::new(k.clone()), Some(k))
        }
    };
    let normals: Vec<Vec<Q>> = a.normals.iter().map(|v| v.0.clone()).collect();
    let reduced = symplectic::reduce_product_iterated(&s, &normals)?;
    let product = BodyDescription::Product {
        q: Box::new(BodyDescription::of(&reduced.base)),
        p: Some(Box::new(BodyDescription::of(&reduced.dual))),
    };
    let mut result = json!({"n": reduced.n(), "body": product});
    let mut pass = true;
    if let Some(action) = &a.action {
        let k = plain.ok_or_else(|| Failure("--action needs a single body K, not a product".into()))?;
        if a.normals.len() != 1 {
            return Err(Failure("--action needs exactly one --normal".into()));
        }
        let r = volume::reduction_volume_bound(&k, &a.normals[0].0, action)?;
        pass = r.holds;
        result["volume_bound"] = to_value(&r);
    }
    Ok(Outcome { result, pass, body_hash: Some(b.hash) })
}

fn run_capacity(a: &CapacityArgs, seed: u64) -> Result<Outcome, Failure> {
    let b = load_body(&a.body)?;
    let k = b.description.build()?;
    let cfg = CapacityConfig { m: a.points, starts: a.starts, seed, symmetric: a.symmetric, max_iter: a.max_iter, ..CapacityConfig::default() };
    let est = capacity::estimate(&k, &cfg)?;
    Ok(Outcome { result: to_value(&est), pass: true, body_hash: Some(b.hash) })
}

fn run_crofton(a: &CroftonArgs, seed: u64) -> Result<Outcome, Failure> {
    let g = Polynomial::parse(&a.g)?;
    let slice = SignedSlice::new(2, a.radius, a.epsilon, g)?;
    let r = crofton::crofton_check(&slice, a.samples, seed)?;
    let pass = r.agrees(a.tolerance, a.sigmas);
    let mut result = to_value(&r);
    result["agrees"] = json!(pass);
    Ok(Outcome { result, pass, body_hash: None })
}

fn embedding_profile(a: &EmbedArgs) -> Result<EmbeddingProfile, Failure> {
    let grid = GridConfig::default();
    Ok(match (&a.cache, a.max) {
        (_, true) => EmbeddingProfile::max_limit(a.alpha, grid)?,
        (Some(path), false) => EmbeddingProfile::cached(path, a.alpha, a.nexp, grid)?,
        (None, false) => EmbeddingProfile::build(a.alpha, a.nexp, grid)?,
    })
}

fn run_embed(a: &EmbedArgs, seed: u64) -> Result<Outcome, Failure> {
    let prof = embedding_profile(a)?;
    let r0 = embedding::critical_radius();
    let eps = embedding::eps_rect_check(&prof, r0, 64, 256)?;
    let radius = match a.radius_factor {
        Some(f) => f * r0,
        None => embedding::certified_radius(a.copies, eps.epsilon),
    };
    let rep = embedding::product_embedding_check(&prof, a.copies, radius, eps.epsilon, a.samples, seed)?;
    let pass = rep.fraction == 1.0;
    let result = json!({"profile": prof, "epsilon": eps, "embedding": rep, "contained": pass});
    Ok(Outcome { result, pass, body_hash: None })
}

fn run_verify(a: &VerifyArgs, seed: u64) -> Result<Outcome, Failure> {
    let params = SuiteParams {
        n: a.n,
        trials: a.trials,
        seed,
        samples: a.samples,
        exponents: a.exponents.clone(),
        n_exp: a.nexp,
        range: a.range,
    };
    let summary = suites::run_suite(&a.suite, &params)?;
    Ok(Outcome { pass: summary.pass, result: to_value(&summary), body_hash: None })
}

fn dispatch(cmd: &Command) -> Result<(&'static str, Value, u64, Outcome), Failure> {
    let (name, params, seed, out) = match cmd {
        Command::Volume(a) => {
            let s = resolve_seed(a.seed)?;
            ("volume", to_value(a), s, run_volume(a, s)?)
        }
        Command::Mahler(a) => {
            let s = resolve_seed(a.common.seed)?;
            ("mahler", to_value(a), s, run_mahler(a, s)?)
        }
        Command::Section(a) => {
            let s = resolve_seed(a.common.seed)?;
            ("section", to_value(a), s, run_slice(a, s, false)?)
        }
        Command::Project(a) => {
            let s = resolve_seed(a.common.seed)?;
            ("project", to_value(a), s, run_slice(a, s, true)?)
        }
        Command::Reduce(a) => ("reduce", to_value(a), resolve_seed(a.seed)?, run_reduce(a)?),
        Command::Capacity(a) => {
            let s = resolve_seed(a.seed)?;
            ("capacity", to_value(a), s, run_capacity(a, s)?)
        }
        Command::Crofton(a) => {
            let s = resolve_seed(a.seed)?;
            ("crofton", to_value(a), s, run_crofton(a, s)?)
        }
        Command::Embed(a) => {
            let s = resolve_seed(a.seed)?;
            ("embed", to_value(a), s, run_embed(a, s)?)
        }
        Command::Verify(a) => {
            let s = resolve_seed(a.seed)?;
            ("verify", to_value(a), s, run_verify(a, s)?)
        }
    };
    Ok((name, params, seed, out))
}

fn log_path(cli: &Cli) -> PathBuf {
    cli.log.clone().or_else(|| std::env::var_os(LOG_ENV).map(PathBuf::from)).unwrap_or_else(|| Path::new(".").join(DEFAULT_LOG))
}

fn run(argv: Vec<String>) -> u8 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let (command, parameters, seed, out) = match dispatch(&cli.command) {
        Ok(x) => x,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let record = ExperimentRecord {
        schema: record::SCHEMA,
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.to_string(),
        argv: argv.into_iter().skip(1).collect(),
        body_hash: out.body_hash,
        parameters,
        seed,
        timestamp: chrono::Utc::now().to_rfc3339(),
        pass: out.pass,
        result: out.result,
    };
    println!("{}", serde_json::to_string_pretty(&record).expect("serializable record"));
    if !cli.no_log {
        let path = log_path(&cli);
        if let Err(e) = record::append(&path, &record) {
            eprintln!("error: cannot append to {}: {e}", path.display());
            return 1;
        }
    }
    if record.pass {
        0
    } else {
        eprintln!("assertion failed: see \"result\"");
        2
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_float_notation() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("250"), Ok(250));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn vectors_parse_rationals() {
        let v = parse_vector("1,-2,3/2").unwrap().0;
        assert_eq!(v.iter().map(fmt_q).collect::<Vec<_>>(), ["1", "-2", "3/2"]);
        assert!(parse_vector("1,x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
