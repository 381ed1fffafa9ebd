//! Batteries of randomized checks, each reporting pass/fail per case.

use serde::Serialize;
use serde_json::{json, Value};

use crate::bodies::hanner::HannerTree;
use crate::bodies::{ConvexBody, LagrangianProduct};
use crate::capacity::{self, CapacityConfig};
use crate::crofton::{self, Polynomial, SignedSlice};
use crate::embedding::{self, EmbeddingProfile, GridConfig};
use crate::error::{Error, Result};
use crate::exact::{self, fmt_q, Q};
use crate::sampling::{block_rng, derive_seed};
use crate::volume::{self, VolumeConfig};

pub const SUITES: [&str; 8] = [
    "sections",
    "sections-lp",
    "sections-hanner",
    "polytopes-2n2",
    "reduction-bound",
    "capacity-monotone",
    "crofton",
    "embedding",
];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteParams {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub samples: u64,
    /// Exponents for `sections-lp`, `α` values for `embedding`.
    pub exponents: Vec<f64>,
    /// Smoothing exponent for `embedding`.
    pub n_exp: u32,
    /// Largest entry of random integer normals.
    pub range: i64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { n: 3, trials: 20, seed: 0, samples: 1_000_000, exponents: vec![1.5, 3.0, 6.0], n_exp: 8, range: 5 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Case {
    pub id: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub params: SuiteParams,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
    pub cases: Vec<Case>,
}

pub fn run_suite(name: &str, params: &SuiteParams) -> Result<SuiteSummary> {
    let cases = match name {
        "sections" => cube_sections(params)?,
        "sections-lp" => lp_sections(params)?,
        "sections-hanner" => hanner_sections(params)?,
        "polytopes-2n2" => polytopes_2n2(params)?,
        "reduction-bound" => reduction_bound(params)?,
        "capacity-monotone" => capacity_monotone(params)?,
        "crofton" => crofton_cases(params)?,
        "embedding" => embedding_cases(params)?,
        _ => return Err(Error::InvalidParameter(format!("unknown suite {name:?}; expected one of {SUITES:?}"))),
    };
    let failed = cases.iter().filter(|c| !c.pass).count();
    Ok(SuiteSummary { suite: name.into(), params: params.clone(), passed: cases.len() - failed, failed, pass: failed == 0, cases })
}

fn need_n(p: &SuiteParams, min: usize) -> Result<()> {
    if p.n < min {
        return Err(Error::InvalidParameter(format!("suite needs n >= {min}, got {}", p.n)));
    }
    Ok(())
}

fn normal_json(u: &[Q]) -> Value {
    json!(u.iter().map(fmt_q).collect::<Vec<_>>())
}

fn random_normals(n: usize, count: usize, range: i64, seed: u64) -> Vec<Vec<Q>> {
    let mut rng = block_rng(seed, 0);
    (0..count).map(|_| capacity::random_normal(n, range, &mut rng)).collect()
}

fn exact_mahler_case(id: String, k: &ConvexBody, extra: Value) -> Result<Case> {
    let r = volume::mahler_product(k, &VolumeConfig::default())?;
    let pass = r.respects_bound(0.0);
    Ok(Case {
        id,
        pass,
        detail: json!({
            "extra": extra,
            "product": r.product_exact.as_ref().map(|s| s.to_string()),
            "bound": fmt_q(&r.bound_exact),
            "ratio": r.ratio,
        }),
    })
}

/// Hyperplane sections of the cube: exact Mahler product against
/// `4^{n−1}/(n−1)!`.
fn cube_sections(p: &SuiteParams) -> Result<Vec<Case>> {
    need_n(p, 2)?;
    let cube = ConvexBody::cube(p.n);
    random_normals(p.n, p.trials, p.range, p.seed)
        .iter()
        .enumerate()
        .map(|(k, u)| exact_mahler_case(format!("cube{}-section-{k}", p.n), &cube.hyperplane_section(u)?.body, normal_json(u)))
        .collect()
}

/// Sections of `ℓ_p` balls by Monte Carlo; a case passes when the product
/// is at least the bound minus three CI half-widths.
fn lp_sections(p: &SuiteParams) -> Result<Vec<Case>> {
    need_n(p, 2)?;
    let normals = random_normals(p.n, p.trials, p.range, p.seed);
    let mut out = Vec::new();
    for &e in &p.exponents {
        let ball = ConvexBody::lp_ball(e, p.n)?;
        for (k, u) in normals.iter().enumerate() {
            let s = ball.hyperplane_section(u)?.body;
            let cfg = VolumeConfig { samples: p.samples, seed: derive_seed(p.seed, (out.len() + 1) as u64) };
            let r = volume::mahler_product(&s, &cfg)?;
            out.push(Case {
                id: format!("l{e}-ball{}-section-{k}", p.n),
                pass: r.respects_bound(3.0),
                detail: json!({
                    "normal": normal_json(u),
                    "product": r.product,
                    "ci_halfwidth": r.product_ci_halfwidth,
                    "bound": r.bound,
                }),
            });
        }
    }
    Ok(out)
}

fn random_tree(leaves: usize, seed: u64, k: u64) -> HannerTree {
    HannerTree::random(leaves, &mut block_rng(derive_seed(seed, k), 1))
}

/// Sections of random Hanner polytopes in dimension `n`.
fn hanner_sections(p: &SuiteParams) -> Result<Vec<Case>> {
    need_n(p, 2)?;
    random_normals(p.n, p.trials, p.range, p.seed)
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let tree = random_tree(p.n, p.seed, k as u64);
            let body = ConvexBody::hanner(tree.clone()).hyperplane_section(u)?.body;
            exact_mahler_case(format!("hanner-section-{k}"), &body, json!({"tree": tree.to_string(), "normal": normal_json(u)}))
        })
        .collect()
}

/// Random integer matrix with nonzero determinant.
fn random_matrix(n: usize, seed: u64) -> Vec<Vec<Q>> {
    let mut rng = block_rng(seed, 2);
    loop {
        let m: Vec<Vec<Q>> = (0..n).map(|_| capacity::random_normal(n, 3, &mut rng)).collect();
        if exact::det(&m) != exact::q(0) {
            return m;
        }
    }
}

/// Symmetric polytopes with at most `2n+2` vertices: projections of
/// `cross_{n+1}` along random normals, then random linear images.
fn polytopes_2n2(p: &SuiteParams) -> Result<Vec<Case>> {
    need_n(p, 2)?;
    let cross = ConvexBody::cross(p.n + 1);
    random_normals(p.n + 1, p.trials, p.range, p.seed)
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let proj = cross.hyperplane_projection(u)?.body;
            let body = proj.linear_image(&random_matrix(p.n, derive_seed(p.seed, k as u64)))?;
            let vertices = body.as_polytope().map(|q| q.vertices().len()).unwrap_or(0);
            let mut case = exact_mahler_case(format!("2n2-{k}"), &body, json!({"normal": normal_json(u), "vertices": vertices}))?;
            case.pass &= vertices <= 2 * p.n + 2;
            Ok(case)
        })
        .collect()
}

/// `vol S' ≥ (n/4) vol S` for one-step reductions of `K × K°`, `K` Hanner.
fn reduction_bound(p: &SuiteParams) -> Result<Vec<Case>> {
    need_n(p, 2)?;
    let four = exact::q(4);
    random_normals(p.n, p.trials, p.range, p.seed)
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let tree = random_tree(p.n, p.seed, k as u64);
            let r = volume::hanner_reduction_bound(&tree, u, &four)?;
            Ok(Case {
                id: format!("reduction-{k}"),
                pass: r.holds,
                detail: json!({
                    "tree": tree.to_string(),
                    "normal": normal_json(u),
                    "lhs": fmt_q(&r.lhs),
                    "rhs": fmt_q(&r.rhs),
                    "equality": r.equality,
                }),
            })
        })
        .collect()
}

/// Capacity of one-step reductions of `cross_n × cube_n` against the
/// capacity of the product, with 2% slack.
fn capacity_monotone(p: &SuiteParams) -> Result<Vec<Case>> {
    need_n(p, 2)?;
    let s = LagrangianProduct::new(ConvexBody::cross(p.n));
    let cfg = CapacityConfig { m: 32, starts: 4, seed: p.seed, ..CapacityConfig::default() };
    let rep = capacity::reduction_monotonicity_experiment(&s, p.trials, p.seed, &cfg, 0.02)?;
    Ok(rep
        .trials
        .iter()
        .enumerate()
        .map(|(k, t)| Case {
            id: format!("monotone-{k}"),
            pass: t.holds,
            detail: json!({"normal": t.normal, "original": rep.original, "reduced": t.reduced}),
        })
        .collect())
}

/// The odd perturbations used by the `crofton` suite.
pub fn crofton_perturbations() -> Vec<(f64, &'static str)> {
    vec![(0.0, "0"), (0.05, "q2^3"), (0.05, "q1*p2^2 - q2^3"), (0.03, "q1^3 + 2*p2*q2^2 - q1*q2^4")]
}

fn crofton_cases(p: &SuiteParams) -> Result<Vec<Case>> {
    crofton_perturbations()
        .into_iter()
        .enumerate()
        .map(|(k, (eps, g))| {
            let slice = SignedSlice::new(2, 1.0, eps, Polynomial::parse(g)?)?;
            let r = crofton::crofton_check(&slice, p.samples, derive_seed(p.seed, k as u64))?;
            let pass = if eps == 0.0 {
                r.agrees(1e-6, 1.0)
            } else {
                r.agrees(0.0, 3.0) && r.lhs >= std::f64::consts::PI - 1e-3
            };
            Ok(Case {
                id: format!("crofton-{k}"),
                pass,
                detail: json!({
                    "epsilon": eps,
                    "g": g,
                    "lhs": r.lhs,
                    "rhs": r.rhs,
                    "ci_halfwidth": r.ci_halfwidth,
                    "mean_positive": r.mean_positive,
                    "degenerate": r.degenerate,
                }),
            })
        })
        .collect()
}

fn embedding_cases(p: &SuiteParams) -> Result<Vec<Case>> {
    let copies = p.n.max(1);
    p.exponents
        .iter()
        .map(|&alpha| {
            let prof = EmbeddingProfile::build(alpha, p.n_exp, GridConfig::default())?;
            let r0 = embedding::critical_radius();
            let eps = embedding::eps_rect_check(&prof, r0, 64, 256)?;
            let radius = embedding::certified_radius(copies, eps.epsilon);
            let rep = embedding::product_embedding_check(&prof, copies, radius, eps.epsilon, p.samples, p.seed)?;
            let checks = embedding::map_checks(&prof, r0, 40, 160, 1e-3)?;
            let pass = rep.fraction == 1.0 && checks.jacobian <= 1e-3 && checks.oddness <= 1e-10;
            Ok(Case {
                id: format!("embedding-alpha-{alpha}"),
                pass,
                detail: json!({"epsilon": eps.epsilon, "radius": radius, "fraction": rep.fraction, "jacobian": checks.jacobian, "oddness": checks.oddness}),
            })
        })
        .collect()
}
