//! Acceptance battery: one line per criterion, nonzero exit on any failure.
//! Pass criterion numbers as arguments to run a subset.

use std::f64::consts::PI;
use std::time::Instant;

use mahler_lab::bodies::hanner::HannerTree;
use mahler_lab::bodies::{ConvexBody, LagrangianProduct};
use mahler_lab::capacity::{self, CapacityConfig};
use mahler_lab::crofton::{self, Polynomial, SignedSlice};
use mahler_lab::embedding::{self, EmbeddingProfile, GridConfig};
use mahler_lab::exact::{self, q, Q};
use mahler_lab::sampling::{block_rng, derive_seed};
use mahler_lab::suites::{run_suite, SuiteParams};
use mahler_lab::symplectic;
use mahler_lab::volume::{self, even_ball_volume, VolumeConfig};

struct Outcome {
    pass: bool,
    summary: String,
}

fn outcome(pass: bool, summary: impl Into<String>) -> Outcome {
    Outcome { pass, summary: summary.into() }
}

fn ints(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

fn exact_ratio_is_one(k: &ConvexBody) -> bool {
    let r = volume::mahler_product(k, &VolumeConfig::default()).unwrap();
    r.ratio_exact.and_then(|s| s.as_rational().cloned()) == Some(q(1))
}

fn c1() -> Outcome {
    let t = Instant::now();
    let mut bad = Vec::new();
    for n in 1..=6 {
        for (name, k) in [("cube", ConvexBody::cube(n)), ("cross", ConvexBody::cross(n))] {
            if !exact_ratio_is_one(&k) {
                bad.push(format!("{name}{n}"));
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(bad.is_empty() && secs < 10.0, format!("cube/cross n=1..6 ratio exactly 1, failures {bad:?}, {secs:.1}s (limit 10s)"))
}

fn c2() -> Outcome {
    let t = Instant::now();
    let mut rng = block_rng(2, 0);
    let mut bad = Vec::new();
    for k in 0..30 {
        let leaves = 1 + (derive_seed(2, k) % 6) as usize;
        let tree = HannerTree::random(leaves, &mut rng);
        if !exact_ratio_is_one(&ConvexBody::hanner(tree.clone())) {
            bad.push(tree.to_string());
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(bad.is_empty() && secs < 60.0, format!("30 Hanner trees with <= 6 leaves, failures {bad:?}, {secs:.1}s (limit 60s)"))
}

fn c3() -> Outcome {
    let t = Instant::now();
    let mut violations = 0;
    let mut cases = 0;
    for n in 3..=5 {
        let s = run_suite("sections", &SuiteParams { n, trials: 200, seed: 3 + n as u64, ..SuiteParams::default() }).unwrap();
        violations += s.failed;
        cases += s.cases.len();
    }
    let hex = ConvexBody::cube(3).hyperplane_section(&ints(&[1, 1, 1])).unwrap().body;
    let r = volume::mahler_product(&hex, &VolumeConfig::default()).unwrap();
    let hex_ok = r.product_exact.as_ref().and_then(|p| p.as_rational().cloned()) == Some(q(9))
        && (r.product - 9.0).abs() < 1e-9
        && r.bound_exact == q(8);
    outcome(
        violations == 0 && hex_ok,
        format!("{cases} cube sections (n=3,4,5), {violations} violations; hexagon product {} vs bound {}; {:.1}s", r.product, r.bound, t.elapsed().as_secs_f64()),
    )
}

fn c4() -> Outcome {
    let t = Instant::now();
    let mut failed = 0;
    let mut cases = 0;
    let mut worst = f64::INFINITY;
    for n in [3, 4] {
        let params = SuiteParams { n, trials: 50, seed: 40 + n as u64, samples: 1_000_000, ..SuiteParams::default() };
        let s = run_suite("sections-lp", &params).unwrap();
        failed += s.failed;
        cases += s.cases.len();
        for c in &s.cases {
            let d = &c.detail;
            let margin = (d["product"].as_f64().unwrap() - d["bound"].as_f64().unwrap()) / d["ci_halfwidth"].as_f64().unwrap().max(1e-300);
            worst = worst.min(margin);
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        failed == 0 && secs < 1800.0,
        format!("{cases} l_p sections, p in {{1.5,3,6}}, n=3,4, 1e6 samples: {failed} below bound - 3 CI; smallest margin {worst:.1} CI; {secs:.0}s (limit 1800s)"),
    )
}

fn c5() -> Outcome {
    let t = Instant::now();
    let cfg = CapacityConfig { m: 32, starts: 8, seed: 5, ..CapacityConfig::default() };
    let mut lines = Vec::new();
    let mut ok = true;
    let mut check = |name: &str, body: &ConvexBody, target: f64, tol: f64| {
        let c = capacity::estimate(body, &cfg).unwrap().value;
        let rel = (c - target) / target;
        ok &= rel.abs() <= tol;
        lines.push(format!("{name} {c:.4}/{target:.4}"));
    };
    check("B4", &ConvexBody::euclidean_ball(4), PI, 0.01);
    check("B6", &ConvexBody::euclidean_ball(6), PI, 0.01);
    for n in [2, 3] {
        check(&format!("cross{n}xcube{n}"), &LagrangianProduct::new(ConvexBody::cross(n)).to_body(), 4.0, 0.02);
    }
    let hexagon: Vec<Vec<Q>> = [[2, 0], [1, 1], [-1, 1], [-2, 0], [-1, -1], [1, -1]].iter().map(|v| ints(v)).collect();
    check("square", &ConvexBody::cube(2), 4.0, 0.01);
    check("diamond", &ConvexBody::cross(2), 2.0, 0.01);
    check("hexagon", &ConvexBody::from_v(2, &hexagon).unwrap(), 6.0, 0.01);
    let skew = ConvexBody::cube(2).linear_image(&[ints(&[2, 1]), ints(&[1, 3])]).unwrap();
    check("skew square", &skew, 20.0, 0.01);
    check("disc", &ConvexBody::euclidean_ball(2), PI, 0.01);
    outcome(ok, format!("{}; {:.0}s", lines.join(", "), t.elapsed().as_secs_f64()))
}

fn c6() -> Outcome {
    let t = Instant::now();
    let cfg = CapacityConfig { m: 32, starts: 4, seed: 6, ..CapacityConfig::default() };
    let base = capacity::reduction_monotonicity_experiment(&LagrangianProduct::new(ConvexBody::cross(3)), 50, 61, &cfg, 0.02).unwrap();
    let mut failures = base.failures;
    let mut trials = base.trials.len();
    let mut lowest = base.trials.iter().map(|t| t.reduced / base.original).fold(f64::INFINITY, f64::min);
    // five random linear images, ten reductions each
    let mut rng = block_rng(62, 0);
    for k in 0..5 {
        let m = loop {
            let m: Vec<Vec<Q>> = (0..3).map(|_| capacity::random_normal(3, 2, &mut rng)).collect();
            if exact::det(&m) != q(0) {
                break m;
            }
        };
        let s = LagrangianProduct::new(ConvexBody::cross(3).linear_image(&m).unwrap());
        let c = CapacityConfig { seed: derive_seed(6, k), ..cfg.clone() };
        let r = capacity::reduction_monotonicity_experiment(&s, 10, derive_seed(63, k), &c, 0.02).unwrap();
        failures += r.failures;
        trials += r.trials.len();
        lowest = lowest.min(r.trials.iter().map(|t| t.reduced / r.original).fold(f64::INFINITY, f64::min));
    }
    outcome(
        failures == 0,
        format!("{trials} reductions (50 of cross3xcube3, 50 over 5 linear images): {failures} below 98%; lowest ratio {lowest:.4}; {:.0}s", t.elapsed().as_secs_f64()),
    )
}

fn c7() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_alt: f64 = 0.0;
    let mut rng = block_rng(7, 0);
    for n in 2..=4 {
        let target = even_ball_volume(n - 1);
        for _ in 0..20 {
            let u = capacity::random_normal(n, 9, &mut rng);
            let spec = symplectic::q_line(&u).unwrap();
            worst = worst.max((symplectic::reduce_ball(&spec).value - target).abs());
            worst_alt = worst_alt.max((symplectic::reduce_ball_orthonormal(&spec).0 - target).abs());
        }
    }
    outcome(worst <= 1e-10 && worst_alt <= 1e-10, format!("60 reduced balls N=2,3,4: max error {worst:.1e} (Schur), {worst_alt:.1e} (orthonormal basis)"))
}

fn c8() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for (k, (eps, g)) in mahler_lab::suites::crofton_perturbations().into_iter().enumerate() {
        let slice = SignedSlice::new(2, 1.0, eps, Polynomial::parse(g).unwrap()).unwrap();
        let r = crofton::crofton_check(&slice, 100_000, derive_seed(8, k as u64)).unwrap();
        let pass = if eps == 0.0 { r.agrees(1e-6, 1.0) } else { r.agrees(0.0, 3.0) && r.lhs >= PI - 1e-3 };
        ok &= pass;
        lines.push(format!("[{eps}*({g}): lhs {:.6} rhs {:.6} CI {:.1e}]", r.lhs, r.rhs, r.ci_halfwidth));
    }
    outcome(ok, format!("{}; {:.0}s", lines.join(" "), t.elapsed().as_secs_f64()))
}

fn c9() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for (k, alpha) in [2.0, 1.5].into_iter().enumerate() {
        let prof = EmbeddingProfile::build(alpha, 8, GridConfig::default()).unwrap();
        let r0 = embedding::critical_radius();
        let eps = embedding::eps_rect_check(&prof, r0, 64, 256).unwrap().epsilon;
        let radius = embedding::certified_radius(2, eps);
        let rep = embedding::product_embedding_check(&prof, 2, radius, eps, 1_000_000, derive_seed(9, k as u64)).unwrap();
        let checks = embedding::map_checks(&prof, r0, 40, 160, 1e-3).unwrap();
        let area = [0.5, 1.0, 2.0, 4.0].iter().map(|&a| (prof.sublevel_area(a) - a).abs() / a).fold(0.0, f64::max);
        let pass = rep.fraction == 1.0 && checks.jacobian <= 1e-3 && checks.oddness <= 1e-10 && area <= 1e-6;
        ok &= pass;
        lines.push(format!(
            "[alpha {alpha}: eps {eps:.5}, R {radius:.5}, fraction {}, |det-1| {:.1e}, oddness {:.1e}, area {area:.1e}]",
            rep.fraction, checks.jacobian, checks.oddness
        ));
    }
    outcome(ok, format!("{}; {:.0}s", lines.join(" "), t.elapsed().as_secs_f64()))
}

fn c10() -> Outcome {
    let t = Instant::now();
    let mut failures = 0;
    let mut cases = 0;
    for n in 3..=5 {
        let s = run_suite("reduction-bound", &SuiteParams { n, trials: 100, seed: 100 + n as u64, ..SuiteParams::default() }).unwrap();
        failures += s.failed;
        cases += s.cases.len();
    }
    let mut equal = true;
    for n in 3..=5 {
        for i in 0..n {
            let mut u = vec![q(0); n];
            u[i] = q(1);
            let r = volume::reduction_volume_bound(&ConvexBody::cube(n), &u, &q(4)).unwrap();
            equal &= r.equality;
        }
    }
    outcome(
        failures == 0 && equal,
        format!("{cases} Hanner reductions (n=3,4,5, A=4): {failures} with vol S' < (n/4) vol S; equality on cube coordinate normals: {equal}; {:.0}s", t.elapsed().as_secs_f64()),
    )
}

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(usize, fn() -> Outcome); 10] = [(1, c1), (2, c2), (3, c3), (4, c4), (5, c5), (6, c6), (7, c7), (8, c8), (9, c9), (10, c10)];
    let mut all = true;
    for (k, f) in criteria {
        if !wanted.is_empty() && !wanted.contains(&k) {
            continue;
        }
        let o = f();
        all &= o.pass;
        println!("criterion {k:>2}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.summary);
    }
    if !all {
        std::process::exit(1);
    }
}
