use std::f64::consts::PI;
use std::sync::OnceLock;

use mahler_lab::embedding::{self, EmbeddingProfile, GridConfig};
use proptest::prelude::*;

const ALPHAS: [f64; 3] = [1.5, 2.0, 3.0];

fn profiles() -> &'static Vec<EmbeddingProfile> {
    static P: OnceLock<Vec<EmbeddingProfile>> = OnceLock::new();
    P.get_or_init(|| {
        let mut v: Vec<EmbeddingProfile> =
            ALPHAS.iter().map(|&a| EmbeddingProfile::build(a, 8, GridConfig::default()).unwrap()).collect();
        v.push(EmbeddingProfile::max_limit(2.0, GridConfig::default()).unwrap());
        v
    })
}

fn disc_point() -> impl Strategy<Value = [f64; 2]> {
    let r = embedding::critical_radius();
    (0.0f64..1.0, 0.0f64..(2.0 * PI)).prop_map(move |(u, t)| {
        let rho = 1.5 * r * u.sqrt();
        [rho * t.cos(), rho * t.sin()]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn planar_map_is_odd(k in 0usize..4, z in disc_point()) {
        let f = &profiles()[k];
        let a = f.planar_map(z).unwrap();
        let b = f.planar_map([-z[0], -z[1]]).unwrap();
        prop_assert!((a[0] + b[0]).abs() <= 1e-10 && (a[1] + b[1]).abs() <= 1e-10);
    }

    #[test]
    fn circles_map_to_level_sets_and_back(k in 0usize..4, z in disc_point()) {
        let f = &profiles()[k];
        let w = f.planar_map(z).unwrap();
        let target = PI * (z[0] * z[0] + z[1] * z[1]);
        prop_assert!((f.g(w[0], w[1]) - target).abs() <= 1e-9 * target.max(1e-12), "{} vs {target}", f.g(w[0], w[1]));
        let back = f.inverse_map(w);
        prop_assert!((back[0] - z[0]).abs() <= 1e-8 && (back[1] - z[1]).abs() <= 1e-8, "{back:?} vs {z:?}");
    }

    #[test]
    fn planar_map_preserves_area(k in 0usize..4, z in disc_point()) {
        prop_assume!(z[0].abs() > 1e-3 && z[1].abs() > 1e-3);
        let f = &profiles()[k];
        let h = 1e-6;
        let d = |dx: f64, dy: f64| {
            let a = f.planar_map([z[0] + dx, z[1] + dy]).unwrap();
            let b = f.planar_map([z[0] - dx, z[1] - dy]).unwrap();
            [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)]
        };
        let (fx, fy) = (d(h, 0.0), d(0.0, h));
        // positive: orientation is preserved
        prop_assert!((fx[0] * fy[1] - fx[1] * fy[0] - 1.0).abs() <= 1e-3);
    }

    #[test]
    fn profile_is_even(k in 0usize..4, q in -2.0f64..2.0, p in -2.0f64..2.0) {
        let f = &profiles()[k];
        let g = f.g(q, p);
        for (a, b) in [(-q, p), (q, -p), (-q, -p)] {
            prop_assert!((f.g(a, b) - g).abs() <= 1e-14 * g.max(1.0));
        }
    }

    #[test]
    fn sum_of_profiles_is_midpoint_convex(
        k in 0usize..4,
        x in prop::collection::vec(-1.5f64..1.5, 6),
        y in prop::collection::vec(-1.5f64..1.5, 6),
    ) {
        let f = &profiles()[k];
        let sum = |v: &[f64]| v.chunks(2).map(|c| f.g(c[0], c[1])).sum::<f64>();
        let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let (fx, fy) = (sum(&x), sum(&y));
        prop_assert!(sum(&m) <= 0.5 * (fx + fy) + 1e-12 * fx.max(fy));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn sublevel_areas_are_normalized(k in 0usize..3, level in 0.01f64..8.0) {
        let a = profiles()[k].sublevel_area(level);
        prop_assert!((a - level).abs() <= 1e-6 * level, "{a} vs {level}");
    }

    #[test]
    fn epsilon_decreases_with_smoothing(alpha in 1.2f64..6.0, n in 1u32..12) {
        let r = embedding::critical_radius();
        let a = EmbeddingProfile::build(alpha, n, GridConfig::default()).unwrap();
        let b = EmbeddingProfile::build(alpha, n + 1, GridConfig::default()).unwrap();
        prop_assert!(a.epsilon_bound(r) >= b.epsilon_bound(r));
        prop_assert!(b.epsilon_bound(r) > 0.0);
        prop_assert!(embedding::certified_radius(2, a.epsilon_bound(r)) <= embedding::certified_radius(2, b.epsilon_bound(r)));
        prop_assert!(embedding::certified_radius(2, b.epsilon_bound(r)) < r);
    }
}
