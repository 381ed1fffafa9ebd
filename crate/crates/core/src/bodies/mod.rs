//! Centrally symmetric convex bodies and their duality operations.
//!
//! A [`ConvexBody`] is either an exact rational polytope (kept in both H- and
//! V-form), an ℓp ball, or a functional combination of other bodies
//! (section, projection, linear image, product, ℓ1-sum). Operations that
//! can stay exact do: polars, linear images, sections and projections of
//! polytopes all return polytopes. Functional bodies evaluate their gauge and
//! support function in `f64`.

pub mod dd;
pub mod describe;
pub mod fiber;
pub mod frame;
pub mod hanner;
pub mod polytope;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::{self, Q, QMat};

pub use describe::BodyDescription;
pub use frame::HyperplaneFrame;
pub use hanner::HannerTree;
pub use polytope::Polytope;

use polytope::fdot;

/// Invertible linear map kept exactly, with `f64` copies for evaluation.
#[derive(Clone, Debug)]
pub struct LinearMap {
    matrix: QMat,
    det: Q,
    m: Vec<Vec<f64>>,
    m_inv: Vec<Vec<f64>>,
}

impl LinearMap {
    pub fn new(matrix: &[Vec<Q>]) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("matrix must be square".into()));
        }
        let inv = exact::inverse(matrix).ok_or(Error::SingularMatrix)?;
        let to_f = |m: &[Vec<Q>]| m.iter().map(|r| exact::vec_to_f64(r)).collect::<Vec<_>>();
        Ok(LinearMap { det: exact::det(matrix), m: to_f(matrix), m_inv: to_f(&inv), matrix: matrix.to_vec() })
    }

    pub fn matrix(&self) -> &[Vec<Q>] {
        &self.matrix
    }

    pub fn det(&self) -> &Q {
        &self.det
    }

    fn inverse_transpose(&self) -> LinearMap {
        let inv = exact::inverse(&self.matrix).expect("invertible");
        LinearMap::new(&exact::transpose(&inv)).expect("invertible")
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.m.iter().map(|r| fdot(r, x)).collect()
    }

    fn apply_inv(&self, x: &[f64]) -> Vec<f64> {
        self.m_inv.iter().map(|r| fdot(r, x)).collect()
    }

    fn apply_transpose(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        (0..n).map(|j| (0..n).map(|i| self.m[i][j] * u[i]).sum()).collect()
    }
}

#[derive(Clone, Debug)]
pub enum Rep {
    Polytope(Arc<Polytope>),
    Hanner { tree: HannerTree, poly: Arc<Polytope> },
    /// Unit ball of the ℓp norm, `1 < p < ∞`.
    LpBall { p: f64, exact_p: Option<Q> },
    Section { parent: Arc<ConvexBody>, frame: Arc<HyperplaneFrame> },
    Projection { parent: Arc<ConvexBody>, frame: Arc<HyperplaneFrame> },
    LinearImage { parent: Arc<ConvexBody>, map: Arc<LinearMap> },
    /// `first × second`, coordinates of `first` first.
    Product(Arc<ConvexBody>, Arc<ConvexBody>),
    /// `conv(first ∪ second)` in complementary coordinate blocks.
    L1Sum(Arc<ConvexBody>, Arc<ConvexBody>),
}

#[derive(Clone, Debug)]
pub struct ConvexBody {
    dim: usize,
    rep: Rep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceKind {
    Section,
    Projection,
}

/// Result of slicing or projecting along a normal `u`.
#[derive(Clone, Debug)]
pub struct Slice {
    pub body: ConvexBody,
    pub frame: Arc<HyperplaneFrame>,
    pub kind: SliceKind,
    /// Always `false` for central sections of bodies with the origin in the
    /// interior; kept so the type can report lower-dimensional results.
    pub degenerate: bool,
}

impl Slice {
    /// Multiplies volumes in frame coordinates into Euclidean volumes.
    pub fn euclidean_volume_factor(&self) -> exact::Surd {
        match self.kind {
            SliceKind::Section => self.frame.section_volume_factor(),
            SliceKind::Projection => self.frame.projection_volume_factor(),
        }
    }
}

impl ConvexBody {
    pub fn cube(n: usize) -> Self {
        Self::polytope(Polytope::cube(n))
    }

    pub fn cross(n: usize) -> Self {
        Self::polytope(Polytope::cross(n))
    }

    pub fn polytope(p: Polytope) -> Self {
        ConvexBody { dim: p.dim(), rep: Rep::Polytope(Arc::new(p)) }
    }

    pub fn hanner(tree: HannerTree) -> Self {
        let poly = Arc::new(tree.to_polytope());
        ConvexBody { dim: tree.dim(), rep: Rep::Hanner { tree, poly } }
    }

    pub fn from_h(dim: usize, rows: &[Vec<Q>]) -> Result<Self> {
        Ok(Self::polytope(Polytope::from_h(dim, rows)?))
    }

    pub fn from_v(dim: usize, points: &[Vec<Q>]) -> Result<Self> {
        Ok(Self::polytope(Polytope::from_v(dim, points)?))
    }

    /// ℓp ball for an exact exponent; `p = 1` gives the cross-polytope.
    pub fn lp_ball_exact(p: &Q, n: usize) -> Result<Self> {
        let pf = exact::to_f64(p);
        if *p < exact::q(1) {
            return Err(Error::ExponentBelowOne(pf));
        }
        if *p == exact::q(1) {
            return Ok(Self::cross(n));
        }
        Ok(ConvexBody { dim: n, rep: Rep::LpBall { p: pf, exact_p: Some(p.clone()) } })
    }

    /// ℓp ball; `p = 1` and `p = ∞` give exact polytopes.
    pub fn lp_ball(p: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        if p.is_nan() || p < 1.0 {
            return Err(Error::ExponentBelowOne(p));
        }
        if p == 1.0 {
            return Ok(Self::cross(n));
        }
        if p.is_infinite() {
            return Ok(Self::cube(n));
        }
        let exact_p = num::BigRational::from_float(p);
        Ok(ConvexBody { dim: n, rep: Rep::LpBall { p, exact_p } })
    }

    pub fn euclidean_ball(n: usize) -> Self {
        Self::lp_ball(2.0, n).expect("p = 2 is valid")
    }

    pub fn product(first: ConvexBody, second: ConvexBody) -> Self {
        ConvexBody { dim: first.dim + second.dim, rep: Rep::Product(Arc::new(first), Arc::new(second)) }
    }

    pub fn l1_sum(first: ConvexBody, second: ConvexBody) -> Self {
        ConvexBody { dim: first.dim + second.dim, rep: Rep::L1Sum(Arc::new(first), Arc::new(second)) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rep(&self) -> &Rep {
        &self.rep
    }

    pub fn kind(&self) -> &'static str {
        match self.rep {
            Rep::Polytope(_) => "polytope",
            Rep::Hanner { .. } => "hanner",
            Rep::LpBall { .. } => "lp_ball",
            Rep::Section { .. } => "section",
            Rep::Projection { .. } => "projection",
            Rep::LinearImage { .. } => "linear_image",
            Rep::Product(..) => "product",
            Rep::L1Sum(..) => "l1_sum",
        }
    }

    /// The polytope behind this body, if it is stored as one.
    pub fn as_polytope(&self) -> Option<&Polytope> {
        match &self.rep {
            Rep::Polytope(p) | Rep::Hanner { poly: p, .. } => Some(p),
            _ => None,
        }
    }

    pub fn hanner_tree(&self) -> Option<&HannerTree> {
        match &self.rep {
            Rep::Hanner { tree, .. } => Some(tree),
            _ => None,
        }
    }

    /// An exact polytope for this body when one exists, assembling products
    /// and ℓ1-sums of polytopes.
    pub fn exact_polytope(&self) -> Option<Polytope> {
        match &self.rep {
            Rep::Polytope(p) | Rep::Hanner { poly: p, .. } => Some((**p).clone()),
            Rep::Product(a, b) => Some(a.exact_polytope()?.product(&b.exact_polytope()?)),
            Rep::L1Sum(a, b) => Some(a.exact_polytope()?.l1_sum(&b.exact_polytope()?)),
            _ => None,
        }
    }

    pub fn is_polytope(&self) -> bool {
        match &self.rep {
            Rep::Polytope(_) | Rep::Hanner { .. } => true,
            Rep::Product(a, b) | Rep::L1Sum(a, b) => a.is_polytope() && b.is_polytope(),
            _ => false,
        }
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: len });
        }
        Ok(())
    }

    /// The polar body `{y : ⟨x, y⟩ <= 1 for all x in K}`.
    pub fn polar(&self) -> ConvexBody {
        let rep = match &self.rep {
            Rep::Polytope(p) => Rep::Polytope(Arc::new(p.polar())),
            Rep::Hanner { tree, poly } => Rep::Hanner { tree: tree.polar(), poly: Arc::new(poly.polar()) },
            Rep::LpBall { p, exact_p } => {
                let exact_q = exact_p.as_ref().map(|p| p / (p - exact::q(1)));
                let q = match &exact_q {
                    Some(q) => exact::to_f64(q),
                    None => p / (p - 1.0),
                };
                Rep::LpBall { p: q, exact_p: exact_q }
            }
            Rep::Section { parent, frame } => Rep::Projection { parent: Arc::new(parent.polar()), frame: frame.clone() },
            Rep::Projection { parent, frame } => Rep::Section { parent: Arc::new(parent.polar()), frame: frame.clone() },
            Rep::LinearImage { parent, map } => {
                Rep::LinearImage { parent: Arc::new(parent.polar()), map: Arc::new(map.inverse_transpose()) }
            }
            Rep::Product(a, b) => Rep::L1Sum(Arc::new(a.polar()), Arc::new(b.polar())),
            Rep::L1Sum(a, b) => Rep::Product(Arc::new(a.polar()), Arc::new(b.polar())),
        };
        ConvexBody { dim: self.dim, rep }
    }

    /// `M K` for an invertible rational `M`.
    pub fn linear_image(&self, m: &[Vec<Q>]) -> Result<ConvexBody> {
        self.check_dim(m.len())?;
        let map = LinearMap::new(m)?;
        if let Some(p) = self.exact_polytope() {
            return Ok(Self::polytope(p.linear_image(m)?));
        }
        Ok(ConvexBody { dim: self.dim, rep: Rep::LinearImage { parent: Arc::new(self.clone()), map: Arc::new(map) } })
    }

    /// `K ∩ u^⊥` in the coordinates of [`HyperplaneFrame`].
    pub fn hyperplane_section(&self, u: &[Q]) -> Result<Slice> {
        self.check_dim(u.len())?;
        let frame = Arc::new(HyperplaneFrame::new(u)?);
        self.section_in(frame)
    }

    pub fn section_in(&self, frame: Arc<HyperplaneFrame>) -> Result<Slice> {
        self.check_dim(frame.ambient_dim())?;
        let body = match self.exact_polytope() {
            Some(p) => Self::polytope(p.section(&frame)?),
            None => ConvexBody {
                dim: self.dim - 1,
                rep: Rep::Section { parent: Arc::new(self.clone()), frame: frame.clone() },
            },
        };
        Ok(Slice { body, frame, kind: SliceKind::Section, degenerate: false })
    }

    /// `K / span(u)` in the quotient coordinates of [`HyperplaneFrame`].
    pub fn hyperplane_projection(&self, u: &[Q]) -> Result<Slice> {
        self.check_dim(u.len())?;
        let frame = Arc::new(HyperplaneFrame::new(u)?);
        self.projection_in(frame)
    }

    pub fn projection_in(&self, frame: Arc<HyperplaneFrame>) -> Result<Slice> {
        self.check_dim(frame.ambient_dim())?;
        let body = match self.exact_polytope() {
            Some(p) => Self::polytope(p.projection(&frame)?),
            None => ConvexBody {
                dim: self.dim - 1,
                rep: Rep::Projection { parent: Arc::new(self.clone()), frame: frame.clone() },
            },
        };
        Ok(Slice { body, frame, kind: SliceKind::Projection, degenerate: false })
    }

    /// Minkowski functional. Exact for polytopes up to the final rounding.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        match &self.rep {
            Rep::Polytope(p) | Rep::Hanner { poly: p, .. } => p.gauge(x),
            Rep::LpBall { p, .. } => lp_norm(x, *p),
            Rep::Section { parent, frame } => parent.gauge(&frame.lift_f64(x)),
            Rep::Projection { parent, frame } => fiber_min_gauge(parent, frame, x, None),
            Rep::LinearImage { parent, map } => parent.gauge(&map.apply_inv(x)),
            Rep::Product(a, b) => {
                let (x1, x2) = x.split_at(a.dim);
                a.gauge(x1).max(b.gauge(x2))
            }
            Rep::L1Sum(a, b) => {
                let (x1, x2) = x.split_at(a.dim);
                a.gauge(x1) + b.gauge(x2)
            }
        }
    }

    /// `gauge(x) <= 1`, deciding projections without full minimization.
    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.rep {
            Rep::Projection { parent, frame } => fiber_min_gauge(parent, frame, x, Some(1.0)) <= 1.0,
            Rep::Section { parent, frame } => parent.contains(&frame.lift_f64(x)),
            Rep::LinearImage { parent, map } => parent.contains(&map.apply_inv(x)),
            Rep::Product(a, b) => {
                let (x1, x2) = x.split_at(a.dim);
                a.contains(x1) && b.contains(x2)
            }
            _ => self.gauge(x) <= 1.0,
        }
    }

    /// Support function `h_K(u) = sup ⟨u, x⟩`.
    pub fn support(&self, u: &[f64]) -> f64 {
        match &self.rep {
            Rep::Polytope(p) | Rep::Hanner { poly: p, .. } => p.support(u),
            Rep::LpBall { p, .. } => lp_norm(u, p / (p - 1.0)),
            Rep::Section { parent, frame } => fiber_min_support(parent, frame, u, 0.0).value,
            Rep::Projection { parent, frame } => parent.support(&frame.lift_f64(u)),
            Rep::LinearImage { parent, map } => parent.support(&map.apply_transpose(u)),
            Rep::Product(a, b) => {
                let (u1, u2) = u.split_at(a.dim);
                a.support(u1) + b.support(u2)
            }
            Rep::L1Sum(a, b) => {
                let (u1, u2) = u.split_at(a.dim);
                a.support(u1).max(b.support(u2))
            }
        }
    }

    /// Support value and a support point (a subgradient of `h_K` at `u`).
    ///
    /// With `smoothing > 0`, polytope supports are replaced by a log-sum-exp
    /// over vertices at temperature `smoothing · |u| · R` (`R` the
    /// circumradius), which is positively homogeneous and scale-covariant.
    /// With `smoothing == 0` the exact maximizing vertex is used, ties broken
    /// lexicographically.
    pub fn support_with_point(&self, u: &[f64], smoothing: f64) -> (f64, Vec<f64>) {
        match &self.rep {
            Rep::Polytope(p) | Rep::Hanner { poly: p, .. } => polytope_support_point(p, u, smoothing),
            Rep::LpBall { p, .. } => {
                let q = p / (p - 1.0);
                let norm = lp_norm(u, q);
                if norm == 0.0 {
                    return (0.0, vec![0.0; u.len()]);
                }
                let grad = u.iter().map(|x| x.signum() * (x.abs() / norm).powf(q - 1.0)).collect();
                (norm, grad)
            }
            Rep::Section { parent, frame } => {
                let r = fiber_min_support(parent, frame, u, smoothing);
                let mut z = vec![0.0; frame.ambient_dim()];
                frame.preimage_f64_into(u, &mut z);
                let n = frame.normal_f64();
                for (zi, ni) in z.iter_mut().zip(n) {
                    *zi += r.argmin * ni;
                }
                let (v, x) = parent.support_with_point(&z, smoothing);
                (v, frame.drop_pivot(&x))
            }
            Rep::Projection { parent, frame } => {
                let (v, x) = parent.support_with_point(&frame.lift_f64(u), smoothing);
                (v, frame.dual_coords_f64(&x))
            }
            Rep::LinearImage { parent, map } => {
                let (v, x) = parent.support_with_point(&map.apply_transpose(u), smoothing);
                (v, map.apply(&x))
            }
            Rep::Product(a, b) => {
                let (u1, u2) = u.split_at(a.dim);
                let (v1, mut x1) = a.support_with_point(u1, smoothing);
                let (v2, x2) = b.support_with_point(u2, smoothing);
                x1.extend(x2);
                (v1 + v2, x1)
            }
            Rep::L1Sum(a, b) => {
                let (u1, u2) = u.split_at(a.dim);
                let (v1, x1) = a.support_with_point(u1, smoothing);
                let (v2, x2) = b.support_with_point(u2, smoothing);
                if v1 >= v2 {
                    let mut x = x1;
                    x.extend(std::iter::repeat_n(0.0, b.dim));
                    (v1, x)
                } else {
                    let mut x = vec![0.0; a.dim];
                    x.extend(x2);
                    (v2, x)
                }
            }
        }
    }

    /// Exact gauge for polytope bodies.
    pub fn gauge_exact(&self, x: &[Q]) -> Option<Q> {
        match &self.rep {
            Rep::Polytope(p) | Rep::Hanner { poly: p, .. } => Some(p.gauge_exact(x)),
            Rep::Product(a, b) => {
                let (x1, x2) = x.split_at(a.dim);
                Some(a.gauge_exact(x1)?.max(b.gauge_exact(x2)?))
            }
            Rep::L1Sum(a, b) => {
                let (x1, x2) = x.split_at(a.dim);
                Some(a.gauge_exact(x1)? + b.gauge_exact(x2)?)
            }
            _ => None,
        }
    }

    /// Exact support function for polytope bodies.
    pub fn support_exact(&self, u: &[Q]) -> Option<Q> {
        self.polar().gauge_exact(u)
    }

    /// Half-widths of the axis-aligned bounding box, `h_K(e_i)` by symmetry.
    pub fn bounding_box(&self) -> Vec<f64> {
        if let Some(p) = self.as_polytope() {
            return p.bounding_box();
        }
        (0..self.dim)
            .map(|i| {
                let mut e = vec![0.0; self.dim];
                e[i] = 1.0;
                self.support(&e)
            })
            .collect()
    }

    /// Checks central symmetry and that the origin is interior, on the given
    /// sample directions for functional bodies.
    pub fn validate(&self, directions: &[Vec<f64>]) -> Result<()> {
        if let Some(p) = self.as_polytope() {
            return if p.is_symmetric() { Ok(()) } else { Err(Error::NotSymmetric("polytope".into())) };
        }
        for d in directions {
            self.check_dim(d.len())?;
            let g = self.gauge(d);
            let neg: Vec<f64> = d.iter().map(|x| -x).collect();
            let gn = self.gauge(&neg);
            if !g.is_finite() || (g - gn).abs() > 1e-9 * g.max(1.0) {
                return Err(Error::NotSymmetric(format!("gauge({d:?}) = {g}, gauge(-x) = {gn}")));
            }
        }
        Ok(())
    }
}

/// `S = K × K°` with `K` in the q-coordinates and `K°` in the p-coordinates.
///
/// As a body in `R^{2n}` the coordinates are `(p, q)`, p-block first.
#[derive(Clone, Debug)]
pub struct LagrangianProduct {
    pub base: ConvexBody,
    pub dual: ConvexBody,
}

impl LagrangianProduct {
    pub fn new(k: ConvexBody) -> Self {
        LagrangianProduct { dual: k.polar(), base: k }
    }

    /// Pairs `base` with an already known polar; no check is made.
    pub fn from_parts(base: ConvexBody, dual: ConvexBody) -> Result<Self> {
        if base.dim != dual.dim {
            return Err(Error::DimensionMismatch { expected: base.dim, got: dual.dim });
        }
        Ok(LagrangianProduct { base, dual })
    }

    /// `n`, half the dimension of `S`.
    pub fn n(&self) -> usize {
        self.base.dim
    }

    pub fn to_body(&self) -> ConvexBody {
        ConvexBody::product(self.dual.clone(), self.base.clone())
    }

    /// `(p, q) ∈ S` iff `q ∈ K` and `p ∈ K°`.
    pub fn contains(&self, z: &[f64]) -> bool {
        let (p, q) = z.split_at(self.n());
        self.base.contains(q) && self.dual.contains(p)
    }
}

pub(crate) fn lp_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    if p == 2.0 {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

fn polytope_support_point(p: &Polytope, u: &[f64], smoothing: f64) -> (f64, Vec<f64>) {
    if smoothing <= 0.0 {
        let v = p.support_vertex(u);
        return (fdot(v, u), v.to_vec());
    }
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let t = smoothing * norm * p.circumradius();
    if t == 0.0 {
        let v = p.support_vertex(u);
        return (fdot(v, u), v.to_vec());
    }
    let vals: Vec<f64> = p.vertices_f64().iter().map(|v| fdot(v, u)).collect();
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = vals.iter().map(|s| ((s - m) / t).exp()).collect();
    let total: f64 = weights.iter().sum();
    let mut point = vec![0.0; u.len()];
    for (w, v) in weights.iter().zip(p.vertices_f64()) {
        for (pi, vi) in point.iter_mut().zip(v) {
            *pi += w / total * vi;
        }
    }
    // d/du of t·log Σ exp(s/t) with t = μ|u|R adds a radial term
    let lse = total.ln();
    let value = m + t * lse;
    if norm > 0.0 {
        let c = smoothing * p.circumradius() * (lse - weights.iter().zip(&vals).map(|(w, s)| w / total * (s - m) / t).sum::<f64>());
        for (pi, ui) in point.iter_mut().zip(u) {
            *pi += c * ui / norm;
        }
    }
    (value, point)
}

/// `min_t gauge(z0(w) + t u)`, the gauge of the projection at `w`.
fn fiber_min_gauge(parent: &ConvexBody, frame: &HyperplaneFrame, w: &[f64], threshold: Option<f64>) -> f64 {
    let n = frame.ambient_dim();
    let mut z0 = vec![0.0; n];
    frame.preimage_f64_into(w, &mut z0);
    let u = frame.normal_f64();
    if let Rep::LpBall { p, .. } = parent.rep {
        return lp_fiber_min(&z0, u, p, threshold);
    }
    let gu = parent.gauge(u);
    let gz = parent.gauge(&z0);
    let mut buf = vec![0.0; n];
    let r = fiber::minimize(
        |t| {
            for i in 0..n {
                buf[i] = z0[i] + t * u[i];
            }
            parent.gauge(&buf)
        },
        2.0 * gz / gu,
        threshold,
    );
    r.value
}

/// `min_t |z0 + t u|_p` through the smooth function `Σ |z0_i + t u_i|^p`.
fn lp_fiber_min(z0: &[f64], u: &[f64], p: f64, threshold: Option<f64>) -> f64 {
    let r = lp_fiber(z0, u, p, threshold);
    r.value.max(0.0).powf(1.0 / p)
}

fn lp_fiber_argmin(z0: &[f64], u: &[f64], p: f64) -> f64 {
    lp_fiber(z0, u, p, None).argmin
}

fn lp_fiber(z0: &[f64], u: &[f64], p: f64, threshold: Option<f64>) -> fiber::FiberMin {
    let scale = lp_norm(z0, p);
    if scale == 0.0 {
        return fiber::FiberMin { value: 0.0, argmin: 0.0 };
    }
    let hw = 2.0 * scale / lp_norm(u, p);
    // work with z0 / scale so the powers stay near 1
    let fdf = |t: f64| {
        let (mut f, mut df) = (0.0, 0.0);
        for (zi, ui) in z0.iter().zip(u) {
            let x = (zi + t * ui) / scale;
            let ax = x.abs();
            if ax > 0.0 {
                let pm1 = ax.powf(p - 1.0);
                f += pm1 * ax;
                df += p * pm1 * x.signum() * ui / scale;
            }
        }
        (f, df)
    };
    let thr = threshold.map(|t| (t / scale).powf(p));
    let r = fiber::minimize_smooth(fdf, hw, thr);
    fiber::FiberMin { value: r.value * scale.powf(p), argmin: r.argmin }
}

/// `min_t h(z0(w) + t u)`, the support of the section at `w`.
fn fiber_min_support(parent: &ConvexBody, frame: &HyperplaneFrame, w: &[f64], smoothing: f64) -> fiber::FiberMin {
    let n = frame.ambient_dim();
    let mut z0 = vec![0.0; n];
    frame.preimage_f64_into(w, &mut z0);
    let u = frame.normal_f64();
    if let (Rep::LpBall { p, .. }, true) = (&parent.rep, smoothing <= 0.0) {
        let q = p / (p - 1.0);
        let value = lp_fiber_min(&z0, u, q, None);
        return fiber::FiberMin { value, argmin: lp_fiber_argmin(&z0, u, q) };
    }
    let eval = |x: &[f64]| if smoothing > 0.0 { parent.support_with_point(x, smoothing).0 } else { parent.support(x) };
    let hu = eval(u);
    let hz = eval(&z0);
    let mut buf = vec![0.0; n];
    fiber::minimize(
        |t| {
            for i in 0..n {
                buf[i] = z0[i] + t * u[i];
            }
            eval(&buf)
        },
        2.0 * hz / hu,
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qf};

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn lagrangian_product_of_cross3() {
        let s = LagrangianProduct::new(ConvexBody::cross(3));
        assert_eq!(s.to_body().dim(), 6);
        // p-block is the cube, q-block the cross-polytope
        assert!(s.contains(&[1.0, -1.0, 0.9, 0.5, 0.2, -0.3]));
        assert!(!s.contains(&[1.1, 0.0, 0.0, 0.1, 0.1, 0.1]));
        assert!(!s.contains(&[0.0, 0.0, 0.0, 0.5, 0.5, 0.1]));
        let seg = LagrangianProduct::new(ConvexBody::cube(1));
        assert_eq!(seg.to_body().exact_polytope().unwrap().vertices().len(), 4);
    }

    #[test]
    fn support_examples() {
        assert_eq!(ConvexBody::cube(3).support(&[1.0, 1.0, 1.0]), 3.0);
        assert_eq!(ConvexBody::cross(3).support(&[1.0, 1.0, 1.0]), 1.0);
        let ball = ConvexBody::euclidean_ball(3);
        assert!(approx(ball.support(&[3.0, 4.0, 0.0]), 5.0, 1e-15));
    }

    #[test]
    fn gauge_examples() {
        assert_eq!(ConvexBody::cube(3).gauge(&[0.5, -0.5, 0.25]), 0.5);
        assert!(approx(ConvexBody::cross(2).gauge(&[0.3, 0.3]), 0.6, 1e-15));
        assert_eq!(ConvexBody::lp_ball(1.5, 4).unwrap().gauge(&[0.0; 4]), 0.0);
        let l15 = ConvexBody::lp_ball(1.5, 4).unwrap();
        let x = [0.2, -0.1, 0.4, 0.3];
        let direct: f64 = x.iter().map(|v: &f64| v.abs().powf(1.5)).sum::<f64>().powf(1.0 / 1.5);
        assert!(approx(l15.gauge(&x), direct, 1e-14));
    }

    #[test]
    fn lp_limits_are_polytopes() {
        assert!(ConvexBody::lp_ball(1.0, 3).unwrap().as_polytope().unwrap().same_set(&Polytope::cross(3)));
        assert!(ConvexBody::lp_ball(f64::INFINITY, 3).unwrap().as_polytope().unwrap().same_set(&Polytope::cube(3)));
        assert_eq!(ConvexBody::lp_ball(0.5, 2).unwrap_err(), Error::ExponentBelowOne(0.5));
    }

    #[test]
    fn polar_of_l3_is_l_three_halves() {
        let k = ConvexBody::lp_ball_exact(&q(3), 3).unwrap().polar();
        match k.rep() {
            Rep::LpBall { exact_p, .. } => assert_eq!(exact_p.as_ref().unwrap(), &qf(3, 2)),
            _ => panic!("expected ℓp ball"),
        }
    }

    #[test]
    fn functional_section_of_lp_ball_by_coordinate_normal() {
        let k = ConvexBody::lp_ball(3.0, 4).unwrap();
        let s = k.hyperplane_section(&[q(0), q(0), q(0), q(1)]).unwrap().body;
        let lower = ConvexBody::lp_ball(3.0, 3).unwrap();
        for x in [[0.1, 0.5, -0.3], [0.9, 0.0, 0.2], [-0.4, -0.4, 0.4]] {
            assert!(approx(s.gauge(&x), lower.gauge(&x), 1e-14));
            assert!(approx(s.support(&x), lower.support(&x), 1e-9));
        }
    }

    #[test]
    fn functional_projection_support_point_lies_on_boundary() {
        let k = ConvexBody::lp_ball(1.5, 3).unwrap();
        let proj = k.hyperplane_projection(&[q(1), q(2), q(-1)]).unwrap().body;
        let u = [0.3, -0.7];
        let (h, x) = proj.support_with_point(&u, 0.0);
        assert!(approx(fdot(&x, &u), h, 1e-9));
        assert!(approx(proj.gauge(&x), 1.0, 1e-7));
    }
}
