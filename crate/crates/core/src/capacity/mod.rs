//! Upper estimates of the EHZ capacity by minimizing over closed polygons
//! the scale-invariant quotient
//!
//! ```text
//! ĉ(γ) = length(γ)² / (4 · action(γ)),   length = Σ ‖z_{i+1} − z_i‖,
//! ```
//!
//! where `‖v‖ = sup { ω(v, z) : z ∈ S } = h_S(J v)`. With this constant the
//! unit ball gives `π` and a planar body gives its area.

mod lbfgs;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::bodies::{ConvexBody, LagrangianProduct, Rep};
use crate::error::{Error, Result};
use crate::exact::{self, Q};
use crate::sampling::{block_rng, derive_seed};
use crate::symplectic::{self, j, PolygonalLoop};

pub use lbfgs::{minimize as lbfgs_minimize, LbfgsOutcome};

/// `‖v‖_S = h_S(J v)`.
pub fn body_norm(s: &ConvexBody, v: &[f64]) -> Result<f64> {
    if v.len() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: v.len() });
    }
    Ok(s.support(&j(v)))
}

/// `Σ ‖z_{i+1} − z_i‖_S` around the closed loop.
pub fn loop_length(s: &ConvexBody, l: &PolygonalLoop) -> Result<f64> {
    if l.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), got: l.dim() });
    }
    let pts = l.points();
    let m = pts.len();
    Ok((0..m)
        .map(|i| {
            let e: Vec<f64> = pts[(i + 1) % m].iter().zip(&pts[i]).map(|(a, b)| a - b).collect();
            s.support(&j(&e))
        })
        .sum())
}

/// `length² / (4 · action)`, or `+∞` for loops with non-positive action.
pub fn clarke_quotient(s: &ConvexBody, l: &PolygonalLoop) -> Result<f64> {
    let a = l.action();
    let len = loop_length(s, l)?;
    Ok(if a > 0.0 { len * len / (4.0 * a) } else { f64::INFINITY })
}

#[derive(Clone, Debug)]
pub struct CapacityConfig {
    /// Number of loop vertices (even for symmetric loops).
    pub m: usize,
    pub starts: usize,
    pub seed: u64,
    pub symmetric: bool,
    /// Total iteration budget per start.
    pub max_iter: usize,
    /// Smoothing temperatures for polytope supports, then an exact phase.
    pub smoothing: Vec<f64>,
}

impl Default for CapacityConfig {
    fn default() -> Self {
        CapacityConfig {
            m: 64,
            starts: 16,
            seed: 0,
            symmetric: false,
            max_iter: 50_000,
            smoothing: vec![0.05, 0.02, 0.01, 0.005, 0.002, 0.001],
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CapacityEstimate {
    pub value: f64,
    #[serde(rename = "loop")]
    pub argmin: PolygonalLoop,
    pub action: f64,
    pub length: f64,
    pub m: usize,
    pub starts: usize,
    pub seed: u64,
    pub symmetric: bool,
    pub converged: bool,
    /// Best start index and the per-start final values.
    pub best_start: usize,
    pub start_values: Vec<f64>,
}

/// The Clarke quotient and its gradient on flattened free vertices.
struct Objective<'a> {
    s: &'a ConvexBody,
    dim: usize,
    symmetric: bool,
    smoothing: f64,
}

impl Objective<'_> {
    fn points(&self, free: &[f64]) -> Vec<Vec<f64>> {
        let mut pts: Vec<Vec<f64>> = free.chunks(self.dim).map(<[f64]>::to_vec).collect();
        if self.symmetric {
            let neg: Vec<Vec<f64>> = pts.iter().map(|v| v.iter().map(|x| -x).collect()).collect();
            pts.extend(neg);
        }
        pts
    }

    fn eval(&self, free: &[f64], grad: &mut [f64]) -> f64 {
        let pts = self.points(free);
        let m = pts.len();
        let d = self.dim;
        let n = d / 2;
        let mut length = 0.0;
        let mut action = 0.0;
        // support points of J e_i
        let mut xs = Vec::with_capacity(m);
        for i in 0..m {
            let a = &pts[i];
            let b = &pts[(i + 1) % m];
            let e: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
            let (h, x) = self.s.support_with_point(&j(&e), self.smoothing);
            length += h;
            xs.push(x);
            action += 0.5 * symplectic::omega(a, b);
        }
        if !(action > 0.0) || !length.is_finite() {
            grad.iter_mut().for_each(|g| *g = 0.0);
            return f64::INFINITY;
        }
        let value = length * length / (4.0 * action);
        let cl = length / (2.0 * action);
        let ca = length * length / (4.0 * action * action);
        // Jᵀ (a, b) = (b, −a) on (p, q) blocks
        let jt = |v: &[f64], out: &mut [f64], k: f64| {
            for i in 0..n {
                out[i] += k * v[n + i];
                out[n + i] -= k * v[i];
            }
        };
        let mut full = vec![0.0; m * d];
        for i in 0..m {
            let prev = (i + m - 1) % m;
            let next = (i + 1) % m;
            let g = &mut full[i * d..(i + 1) * d];
            // ∂L/∂z_i = Jᵀ (x_{i−1} − x_i)
            jt(&xs[prev], g, cl);
            jt(&xs[i], g, -cl);
            // ∂A/∂z_i = ½ Jᵀ (z_{i+1} − z_{i−1})
            jt(&pts[next], g, -0.5 * ca);
            jt(&pts[prev], g, 0.5 * ca);
        }
        let k = free.len() / d;
        for i in 0..k {
            for c in 0..d {
                let mut v = full[i * d + c];
                if self.symmetric {
                    v -= full[(i + k) * d + c];
                }
                grad[i * d + c] = v;
            }
        }
        value
    }
}

/// `true` when no polytope support occurs inside the body.
fn is_smooth(s: &ConvexBody) -> bool {
    match s.rep() {
        Rep::LpBall { .. } => true,
        Rep::Polytope(_) | Rep::Hanner { .. } | Rep::L1Sum(..) => false,
        Rep::Product(a, b) => is_smooth(a) && is_smooth(b),
        Rep::LinearImage { parent, .. } | Rep::Section { parent, .. } | Rep::Projection { parent, .. } => {
            is_smooth(parent)
        }
    }
}

/// A random ellipse `r₁ cos θ a + r₂ sin θ b` in a symplectic 2-plane with
/// positive action.
fn random_start(dim: usize, m: usize, symmetric: bool, rng: &mut impl Rng) -> Vec<f64> {
    let gauss = |rng: &mut dyn rand::RngCore| -> Vec<f64> { (0..dim).map(|_| rng.sample(StandardNormal)).collect() };
    let normalize = |v: Vec<f64>| {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / n).collect::<Vec<f64>>()
    };
    let a = normalize(gauss(rng));
    let mut c = gauss(rng);
    // b = J a tilted toward a random direction, still with ω(a, b) > 0
    let ja = j(&a);
    let proj: f64 = c.iter().zip(&ja).map(|(x, y)| x * y).sum();
    c.iter_mut().zip(&ja).for_each(|(x, y)| *x -= proj * y);
    let c = normalize(c);
    let tilt: f64 = rng.random_range(0.0..0.6);
    let b = normalize(ja.iter().zip(&c).map(|(x, y)| tilt.cos() * x + tilt.sin() * y).collect());
    let r1: f64 = rng.random_range(0.5..1.5);
    let r2: f64 = rng.random_range(0.5..1.5);
    let k = if symmetric { m / 2 } else { m };
    let mut out = Vec::with_capacity(k * dim);
    for i in 0..k {
        let t = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
        out.extend(a.iter().zip(&b).map(|(x, y)| r1 * t.cos() * x + r2 * t.sin() * y));
    }
    out
}

struct StartResult {
    value: f64,
    free: Vec<f64>,
    converged: bool,
}

/// Relative improvement over 100 steps below which a phase stops. Smoothed
/// phases are only warm starts and stop early.
const WARM_STALL: f64 = 1e-7;
const EXACT_STALL: f64 = 1e-10;

fn run_start(s: &ConvexBody, cfg: &CapacityConfig, free0: Vec<f64>) -> StartResult {
    let dim = s.dim();
    let mut phases: Vec<f64> = if is_smooth(s) { Vec::new() } else { cfg.smoothing.clone() };
    phases.push(0.0);
    let budget = (cfg.max_iter / phases.len()).max(1);
    let mut free = free0;
    let mut converged = false;
    for mu in phases {
        let obj = Objective { s, dim, symmetric: cfg.symmetric, smoothing: mu };
        let tol = if mu > 0.0 { WARM_STALL } else { EXACT_STALL };
        let out = lbfgs::minimize(|x, g| obj.eval(x, g), free, budget, tol);
        free = out.x;
        converged = out.converged;
    }
    let obj = Objective { s, dim, symmetric: cfg.symmetric, smoothing: 0.0 };
    let mut g = vec![0.0; free.len()];
    let value = obj.eval(&free, &mut g);
    StartResult { value, free, converged }
}

fn to_loop(free: &[f64], dim: usize, symmetric: bool) -> Result<PolygonalLoop> {
    let v: Vec<Vec<f64>> = free.chunks(dim).map(<[f64]>::to_vec).collect();
    if symmetric {
        PolygonalLoop::symmetric(v)
    } else {
        PolygonalLoop::new(v)
    }
}

fn check_config(s: &ConvexBody, cfg: &CapacityConfig) -> Result<()> {
    if s.dim() % 2 != 0 {
        return Err(Error::InvalidParameter(format!("capacity needs an even-dimensional body, got {}", s.dim())));
    }
    if cfg.m < 4 || (cfg.symmetric && cfg.m % 2 != 0) {
        return Err(Error::InvalidParameter(format!("invalid number of loop vertices {}", cfg.m)));
    }
    if cfg.starts == 0 {
        return Err(Error::InvalidParameter("at least one start is needed".into()));
    }
    Ok(())
}

/// Multi-start minimization of the Clarke quotient over closed m-gons.
pub fn estimate(s: &ConvexBody, cfg: &CapacityConfig) -> Result<CapacityEstimate> {
    check_config(s, cfg)?;
    let dim = s.dim();
    let results: Vec<StartResult> = (0..cfg.starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = block_rng(cfg.seed, k as u64);
            run_start(s, cfg, random_start(dim, cfg.m, cfg.symmetric, &mut rng))
        })
        .collect();
    finish(s, cfg, results)
}

fn finish(s: &ConvexBody, cfg: &CapacityConfig, results: Vec<StartResult>) -> Result<CapacityEstimate> {
    let start_values: Vec<f64> = results.iter().map(|r| r.value).collect();
    // ties resolved by start index, so the result does not depend on scheduling
    let (best_start, best) = results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.value.is_finite())
        .min_by(|(i, a), (k, b)| a.value.total_cmp(&b.value).then(i.cmp(k)))
        .ok_or_else(|| Error::InvalidParameter("every start collapsed to zero action".into()))?;
    let argmin = to_loop(&best.free, s.dim(), cfg.symmetric)?;
    Ok(CapacityEstimate {
        value: best.value,
        action: argmin.action(),
        length: loop_length(s, &argmin)?,
        argmin,
        m: cfg.m,
        starts: cfg.starts,
        seed: cfg.seed,
        symmetric: cfg.symmetric,
        converged: best.converged,
        best_start,
        start_values,
    })
}

pub fn capacity_estimate(s: &ConvexBody, m: usize, starts: usize, seed: u64) -> Result<CapacityEstimate> {
    estimate(s, &CapacityConfig { m, starts, seed, ..CapacityConfig::default() })
}

/// The same minimization restricted to loops with `z_{i+m/2} = −z_i`.
pub fn symmetric_capacity_estimate(s: &ConvexBody, m: usize, starts: usize, seed: u64) -> Result<CapacityEstimate> {
    estimate(s, &CapacityConfig { m, starts, seed, symmetric: true, ..CapacityConfig::default() })
}

/// Subdivides every edge of the argmin loop and re-optimizes from it; the
/// subdivided loop has the same value, so the result never increases.
pub fn refine(s: &ConvexBody, est: &CapacityEstimate, cfg: &CapacityConfig) -> Result<CapacityEstimate> {
    let fine = est.argmin.subdivided();
    let cfg = CapacityConfig { m: fine.m(), symmetric: est.symmetric, ..cfg.clone() };
    let free: Vec<f64> = fine.free_vertices().concat();
    let r = run_start(s, &cfg, free.clone());
    let obj = Objective { s, dim: s.dim(), symmetric: cfg.symmetric, smoothing: 0.0 };
    let mut g = vec![0.0; free.len()];
    let start_value = obj.eval(&free, &mut g);
    let kept = if r.value <= start_value { r } else { StartResult { value: start_value, free, converged: r.converged } };
    let mut out = finish(s, &cfg, vec![kept])?;
    out.starts = est.starts;
    out.seed = est.seed;
    out.start_values = vec![out.value];
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityTrial {
    pub normal: Vec<String>,
    pub reduced: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub original: f64,
    pub slack: f64,
    pub trials: Vec<MonotonicityTrial>,
    pub failures: usize,
}

/// Random nonzero integer vector with entries in `[-range, range]`.
pub fn random_normal(n: usize, range: i64, rng: &mut impl Rng) -> Vec<Q> {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.random_range(-range..=range)).collect();
        if v.iter().any(|&x| x != 0) {
            return v.into_iter().map(exact::q).collect();
        }
    }
}

/// Compares `ĉ(S)` with `ĉ(S')` for one-step reductions along random
/// rational normals; a trial holds when `ĉ(S') >= (1 − slack) ĉ(S)`.
pub fn reduction_monotonicity_experiment(
    s: &LagrangianProduct,
    trials: usize,
    seed: u64,
    cfg: &CapacityConfig,
    slack: f64,
) -> Result<MonotonicityReport> {
    if s.n() < 2 {
        return Err(Error::InvalidParameter("reduction needs n >= 2".into()));
    }
    let original = estimate(&s.to_body(), cfg)?.value;
    let mut rng = block_rng(derive_seed(seed, 7), 0);
    let normals: Vec<Vec<Q>> = (0..trials).map(|_| random_normal(s.n(), 5, &mut rng)).collect();
    let mut out = Vec::with_capacity(trials);
    for (k, u) in normals.iter().enumerate() {
        let reduced = symplectic::reduce_product(s, u)?;
        let c = CapacityConfig { seed: derive_seed(seed, k as u64), ..cfg.clone() };
        let value = estimate(&reduced.to_body(), &c)?.value;
        out.push(MonotonicityTrial {
            normal: u.iter().map(exact::fmt_q).collect(),
            reduced: value,
            holds: value >= (1.0 - slack) * original,
        });
    }
    let failures = out.iter().filter(|t| !t.holds).count();
    Ok(MonotonicityReport { original, slack, trials: out, failures })
}
