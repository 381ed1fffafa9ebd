use mahler_lab::bodies::{ConvexBody, HannerTree, LagrangianProduct};
use mahler_lab::exact::{self, Q};
use mahler_lab::sampling::block_rng;
use mahler_lab::symplectic::{self, omega, PolygonalLoop, SymplecticSpace};
use num::{One, Zero};
use proptest::prelude::*;

fn qvec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| exact::q(x)).collect()
}

fn normal(n: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, n).prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, n)
}

/// `[[A, A S], [0, A^{-T}]]`-type symplectic map on `(p, q)`: first the
/// shear `p += S q` with `S` symmetric, then `(p, q) ↦ (A^{-T} p, A q)`.
fn symplectic_map(a: &[f64; 4], s: &[f64; 3], z: &[f64]) -> Vec<f64> {
    let (p, q) = (&z[..2], &z[2..]);
    let p = [p[0] + s[0] * q[0] + s[1] * q[1], p[1] + s[1] * q[0] + s[2] * q[1]];
    let det = a[0] * a[3] - a[1] * a[2];
    // A^{-T} = [[a3, −a2], [−a1, a0]] / det
    let pn = [(a[3] * p[0] - a[2] * p[1]) / det, (-a[1] * p[0] + a[0] * p[1]) / det];
    let qn = [a[0] * q[0] + a[1] * q[1], a[2] * q[0] + a[3] * q[1]];
    vec![pn[0], pn[1], qn[0], qn[1]]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn omega_is_bilinear_and_antisymmetric(x in vector(6), y in vector(6), z in vector(6), c in -3.0f64..3.0) {
        prop_assert!((omega(&x, &y) + omega(&y, &x)).abs() < 1e-12);
        let xz: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a + c * b).collect();
        prop_assert!((omega(&xz, &y) - omega(&x, &y) - c * omega(&z, &y)).abs() < 1e-10);
        let space = SymplecticSpace::new(3);
        prop_assert!(space.omega(&x[..4], &y[..4]).is_err());
    }

    #[test]
    fn quotient_basis_is_standard(u in normal(4)) {
        let spec = symplectic::q_line(&qvec(&u)).unwrap();
        prop_assert_eq!(spec.lomega_dim(), 7);
        prop_assert!(spec.in_lomega(spec.line()));
        let b = spec.quotient_basis();
        let k = b.len() / 2;
        prop_assert_eq!(k, 3);
        for i in 0..2 * k {
            prop_assert!(spec.in_lomega(&b[i]));
            for j in 0..2 * k {
                let w = SymplecticSpace::new(4).omega_exact(&b[i], &b[j]).unwrap();
                let want = if i < k && j == i + k { Q::one() } else if j < k && i == j + k { -Q::one() } else { Q::zero() };
                prop_assert_eq!(w, want);
            }
        }
    }

    #[test]
    fn polygon_action_is_symplectic_invariant(
        pts in prop::collection::vec(vector(4), 4..9),
        a in prop::array::uniform4(-2.0f64..2.0),
        s in prop::array::uniform3(-2.0f64..2.0),
    ) {
        prop_assume!((a[0] * a[3] - a[1] * a[2]).abs() > 0.2);
        let l = PolygonalLoop::new(pts.clone()).unwrap();
        let ml = PolygonalLoop::new(pts.iter().map(|z| symplectic_map(&a, &s, z)).collect()).unwrap();
        prop_assert!((l.action() - ml.action()).abs() <= 1e-9 * (1.0 + l.action().abs()));
    }

    #[test]
    fn reduced_ball_volume_is_basis_independent(u in normal(5)) {
        let spec = symplectic::q_line(&qvec(&u)).unwrap();
        let v = symplectic::reduce_ball(&spec).value;
        let (w, defect) = symplectic::reduce_ball_orthonormal(&spec);
        prop_assert!(defect < 1e-12);
        prop_assert!((v - w).abs() <= 1e-12 * v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduction_is_projection_times_section(
        leaves in 2usize..=5,
        seed in any::<u64>(),
        u in normal(5),
        w in vector(4),
    ) {
        let k = ConvexBody::hanner(HannerTree::random(leaves, &mut block_rng(seed, 0)));
        let u = qvec(&u[..leaves]);
        prop_assume!(!exact::is_zero_vec(&u));
        let r = symplectic::reduce_body(&k, &u).unwrap();
        let proj = k.hyperplane_projection(&u).unwrap().body;
        let sec = k.polar().hyperplane_section(&u).unwrap().body;
        prop_assert!(r.base.exact_polytope().unwrap().same_set(&proj.exact_polytope().unwrap()));
        prop_assert!(r.dual.exact_polytope().unwrap().same_set(&sec.exact_polytope().unwrap()));
        // the factors are again polar to each other
        let w = &w[..leaves - 1];
        let (g, h) = (r.dual.gauge(w), r.base.support(w));
        prop_assert!((g - h).abs() <= 1e-10 * g.max(1.0));
        let s = LagrangianProduct::new(k.clone());
        prop_assert_eq!(s.n(), leaves);
    }
}
