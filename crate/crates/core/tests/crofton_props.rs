use std::f64::consts::PI;

use mahler_lab::crofton::{self, HopfCircle, Polynomial, SignedSlice};
use proptest::prelude::*;

/// An odd polynomial in `q1, p2, q2` with terms of odd degree at most 5.
fn odd_polynomial() -> impl Strategy<Value = String> {
    let term = (-1.0f64..1.0, 0u32..=3, 0u32..=3, 0u32..=3)
        .prop_filter("odd degree", |&(_, a, b, c)| (a + b + c) % 2 == 1 && a + b + c <= 5)
        .prop_map(|(k, a, b, c)| {
            let factors: String = [("q1", a), ("p2", b), ("q2", c)]
                .iter()
                .filter(|&&(_, e)| e > 0)
                .map(|&(v, e)| format!("*{v}^{e}"))
                .collect();
            (k, factors)
        });
    prop::collection::vec(term, 1..4).prop_map(|ts| {
        let mut out = String::new();
        for (i, (k, f)) in ts.iter().enumerate() {
            let sign = if *k < 0.0 { "-" } else if i > 0 { "+" } else { "" };
            out += &format!(" {sign} {:.3}{f}", k.abs().max(0.001));
        }
        out
    })
}

/// Largest `ε` keeping `|ε|·Σ|c|·deg ≤ ½` on the unit sphere.
fn admissible_epsilon(g: &Polynomial, fraction: f64) -> f64 {
    fraction * 0.5 / g.lipschitz_bound(1.0).max(1e-12)
}

fn base_point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 4).prop_filter("away from 0", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomials_print_and_parse_back(text in odd_polynomial()) {
        let g = Polynomial::parse(&text).unwrap();
        prop_assert!(g.is_odd());
        prop_assert_eq!(Polynomial::parse(&g.to_string()).unwrap(), g);
    }

    #[test]
    fn hopf_circles_stay_on_the_sphere(z in base_point(), theta in 0.0f64..(2.0 * PI)) {
        let c = HopfCircle::new(z.clone()).unwrap();
        let r = c.radius();
        let p = c.point(theta);
        prop_assert!((p.iter().map(|x| x * x).sum::<f64>().sqrt() - r).abs() <= 1e-12 * r);
        // −z lies on the same circle, half a turn later
        let neg = HopfCircle::new(z.iter().map(|x| -x).collect()).unwrap();
        let a = neg.point(theta);
        let b = c.point(theta + PI);
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
    }

    #[test]
    fn crossings_are_invariant_under_antipodes(z in base_point(), text in odd_polynomial(), f in 0.0f64..1.0) {
        let g = Polynomial::parse(&text).unwrap();
        let eps = admissible_epsilon(&g, f);
        let slice = SignedSlice::new(2, 1.0, eps, g).unwrap();
        let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
        let z: Vec<f64> = z.iter().map(|x| x / norm).collect();
        let a = crofton::signed_intersections(&HopfCircle::new(z.clone()).unwrap(), &slice).unwrap();
        let b = crofton::signed_intersections(&HopfCircle::new(z.iter().map(|x| -x).collect()).unwrap(), &slice).unwrap();
        prop_assert_eq!(a, b);
        // H is odd, so every circle meets H = 0 as often upward as downward
        if !a.degenerate {
            prop_assert_eq!(a.positive, a.negative);
        }
    }

    #[test]
    fn linear_slice_is_met_once_each_way(z in base_point()) {
        let slice = SignedSlice::linear(2, 1.0).unwrap();
        let c = crofton::signed_intersections(&HopfCircle::new(z).unwrap(), &slice).unwrap();
        prop_assert_eq!((c.positive, c.negative, c.degenerate), (1, 1, false));
    }

    #[test]
    fn slice_hamiltonian_is_odd(z in base_point(), text in odd_polynomial()) {
        let g = Polynomial::parse(&text).unwrap();
        let slice = SignedSlice::new(2, 1.0, admissible_epsilon(&g, 1.0), g).unwrap();
        let neg: Vec<f64> = z.iter().map(|x| -x).collect();
        prop_assert!((slice.h(&z) + slice.h(&neg)).abs() <= 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn positive_area_is_at_least_pi(text in odd_polynomial(), f in 0.0f64..1.0) {
        let g = Polynomial::parse(&text).unwrap();
        let slice = SignedSlice::new(2, 1.0, admissible_epsilon(&g, f), g).unwrap();
        let area = crofton::sigma_plus_area(&slice).unwrap();
        prop_assert!(area >= PI - 1e-6, "{area}");
    }
}
