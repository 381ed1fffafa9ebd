use std::f64::consts::PI;

use mahler_lab::bodies::ConvexBody;
use mahler_lab::capacity::{self, CapacityConfig};
use mahler_lab::exact::{self, Q};
use mahler_lab::volume::{self, VolumeConfig};
use proptest::prelude::*;

fn cfg(seed: u64) -> CapacityConfig {
    CapacityConfig { m: 16, starts: 2, seed, ..CapacityConfig::default() }
}

fn qmat(m: &[Vec<i64>]) -> Vec<Vec<Q>> {
    m.iter().map(|r| r.iter().map(|&x| exact::q(x)).collect()).collect()
}

/// The integer symplectic map `(p, q) ↦ (A^{-T}(p + S q), A q)` with
/// `A = [[1, a], [0, 1]]` and `S` symmetric.
fn symplectic_matrix(a: i64, s: [i64; 3]) -> Vec<Vec<i64>> {
    // A^{-T} = [[1, 0], [−a, 1]]
    let s = [[s[0], s[1]], [s[1], s[2]]];
    let mut m = vec![vec![0; 4]; 4];
    m[0][0] = 1;
    m[1][0] = -a;
    m[1][1] = 1;
    for j in 0..2 {
        m[0][2 + j] = s[0][j];
        m[1][2 + j] = -a * s[0][j] + s[1][j];
    }
    m[2][2] = 1;
    m[2][3] = a;
    m[3][3] = 1;
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn estimate_scales_quadratically(seed in any::<u64>(), num in 1i64..=4, den in 1i64..=3) {
        let ball = ConvexBody::lp_ball(2.0, 4).unwrap();
        let s = exact::qf(num, den);
        let scaled = ball.linear_image(&[
            vec![s.clone(), exact::q(0), exact::q(0), exact::q(0)],
            vec![exact::q(0), s.clone(), exact::q(0), exact::q(0)],
            vec![exact::q(0), exact::q(0), s.clone(), exact::q(0)],
            vec![exact::q(0), exact::q(0), exact::q(0), s.clone()],
        ]).unwrap();
        let a = capacity::estimate(&ball, &cfg(seed)).unwrap().value;
        let b = capacity::estimate(&scaled, &cfg(seed)).unwrap().value;
        let sf = exact::to_f64(&s);
        prop_assert!((b - sf * sf * a).abs() <= 1e-9 * b, "{a} {b} {sf}");
    }

    #[test]
    fn estimate_bounds_the_area_of_polygons(
        pts in prop::collection::vec((-4i64..=4, -4i64..=4), 2..5),
        seed in any::<u64>(),
    ) {
        let mut vs: Vec<Vec<Q>> = pts.iter().map(|&(x, y)| vec![exact::q(x), exact::q(y)]).collect();
        vs.extend(pts.iter().map(|&(x, y)| vec![exact::q(-x), exact::q(-y)]));
        let Ok(k) = ConvexBody::from_v(2, &vs) else { return Ok(()) };
        let area = volume::volume(&k, &VolumeConfig::default()).unwrap().value;
        let est = capacity::estimate(&k, &CapacityConfig { m: 12, starts: 2, seed, ..CapacityConfig::default() }).unwrap();
        prop_assert!(est.value >= area * (1.0 - 1e-9), "{} < {area}", est.value);
        prop_assert!(est.value <= area * 1.01, "{} vs {area}", est.value);
    }

    #[test]
    fn refinement_never_increases_the_estimate(seed in any::<u64>()) {
        let k = ConvexBody::product(ConvexBody::cross(2), ConvexBody::cube(2));
        let c = CapacityConfig { m: 8, starts: 2, seed, ..CapacityConfig::default() };
        let est = capacity::estimate(&k, &c).unwrap();
        let fine = capacity::refine(&k, &est, &c).unwrap();
        prop_assert_eq!(fine.m, 2 * est.m);
        prop_assert!(fine.value <= est.value * (1.0 + 1e-12), "{} > {}", fine.value, est.value);
        prop_assert!(est.value >= 4.0 * (1.0 - 1e-9));
    }

    #[test]
    fn estimate_is_a_symplectic_invariant(a in -2i64..=2, s in prop::array::uniform3(-1i64..=1), seed in any::<u64>()) {
        let ball = ConvexBody::lp_ball(2.0, 4).unwrap();
        let img = ball.linear_image(&qmat(&symplectic_matrix(a, s))).unwrap();
        let c = CapacityConfig { m: 32, starts: 4, seed, ..CapacityConfig::default() };
        let est = capacity::estimate(&img, &c).unwrap();
        prop_assert!((est.value / PI - 1.0).abs() < 0.01, "{}", est.value);
        // the argmin of a smooth strictly convex body is centrally symmetric
        let pts = est.argmin.points();
        let m = pts.len();
        let centre: Vec<f64> = (0..4).map(|i| pts.iter().map(|z| z[i]).sum::<f64>() / m as f64).collect();
        let diam = pts.iter().flat_map(|a| pts.iter().map(move |b| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())).fold(0.0, f64::max);
        let asym = (0..m / 2).map(|i| {
            pts[i].iter().zip(&pts[i + m / 2]).zip(&centre).map(|((x, y), c)| (x + y - 2.0 * c).powi(2)).sum::<f64>().sqrt()
        }).fold(0.0, f64::max);
        prop_assert!(asym <= 1e-3 * diam, "asymmetry {asym} vs diameter {diam}");
    }
}

#[test]
fn symplectic_matrix_preserves_omega() {
    let m = symplectic_matrix(2, [1, -1, 1]);
    let apply = |x: &[f64]| -> Vec<f64> { (0..4).map(|i| (0..4).map(|j| m[i][j] as f64 * x[j]).sum()).collect() };
    let basis: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for x in &basis {
        for y in &basis {
            let w = mahler_lab::symplectic::omega(x, y);
            assert_eq!(mahler_lab::symplectic::omega(&apply(x), &apply(y)), w);
        }
    }
}
