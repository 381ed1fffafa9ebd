//! The standard symplectic space `R^{2N}` with coordinates
//! `(p_1, …, p_N, q_1, …, q_N)` and linear reduction along isotropic lines
//! of the q-subspace.
//!
//! `ω((p', q'), (p'', q'')) = Σ p'_i q''_i − p''_i q'_i` and the primitive
//! `λ = ½ Σ (p_i dq_i − q_i dp_i)`, so the action of a closed polygon is
//! `½ Σ ω(z_i, z_{i+1})`.

use std::sync::Arc;

use num::{One, Zero};
use serde::Serialize;

use crate::bodies::{ConvexBody, HyperplaneFrame, LagrangianProduct};
use crate::error::{Error, Result};
use crate::exact::{self, Q, QMat};
use crate::volume::{even_ball_volume, VolumeResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SymplecticSpace {
    /// Half-dimension `N`.
    pub n: usize,
}

impl SymplecticSpace {
    pub fn new(n: usize) -> Self {
        SymplecticSpace { n }
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn omega(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        for len in [x.len(), y.len()] {
            if len != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), got: len });
            }
        }
        Ok(omega(x, y))
    }

    pub fn omega_exact(&self, x: &[Q], y: &[Q]) -> Result<Q> {
        for len in [x.len(), y.len()] {
            if len != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), got: len });
            }
        }
        let n = self.n;
        let mut s = Q::zero();
        for i in 0..n {
            s += &x[i] * &y[n + i] - &y[i] * &x[n + i];
        }
        Ok(s)
    }

    /// `½ Σ ω(z_i, z_{i+1})` over the closed polygon.
    pub fn polygon_action(&self, l: &PolygonalLoop) -> Result<f64> {
        if l.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: l.dim() });
        }
        Ok(l.action())
    }
}

/// `ω(x, y)` for `x, y` of equal even length.
pub fn omega(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() / 2;
    (0..n).map(|i| x[i] * y[n + i] - y[i] * x[n + i]).sum()
}

/// `J v` with `⟨J v, z⟩ = ω(v, z)`: `J (p, q) = (−q, p)`.
pub fn j(v: &[f64]) -> Vec<f64> {
    let n = v.len() / 2;
    v[n..].iter().map(|x| -x).chain(v[..n].iter().copied()).collect()
}

/// Closed polygon `z_0, …, z_{m−1}` (edge `m−1 → 0` implied).
///
/// A symmetric loop stores `z_0, …, z_{m/2−1}` and has `z_{i+m/2} = −z_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolygonalLoop {
    vertices: Vec<Vec<f64>>,
    symmetric: bool,
}

impl PolygonalLoop {
    pub fn new(mut vertices: Vec<Vec<f64>>) -> Result<Self> {
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        Self::check(&vertices, 3)?;
        Ok(PolygonalLoop { vertices, symmetric: false })
    }

    /// Symmetric loop from its first half.
    pub fn symmetric(half: Vec<Vec<f64>>) -> Result<Self> {
        Self::check(&half, 2)?;
        Ok(PolygonalLoop { vertices: half, symmetric: true })
    }

    fn check(v: &[Vec<f64>], min: usize) -> Result<()> {
        if v.len() < min {
            return Err(Error::OpenLoop(v.len()));
        }
        let d = v[0].len();
        if d == 0 || d % 2 != 0 {
            return Err(Error::InvalidParameter(format!("loop vertices must have even positive length, got {d}")));
        }
        if let Some(bad) = v.iter().find(|x| x.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: bad.len() });
        }
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Stored (free) vertices.
    pub fn free_vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    /// Number of vertices of the full loop.
    pub fn m(&self) -> usize {
        if self.symmetric {
            2 * self.vertices.len()
        } else {
            self.vertices.len()
        }
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut pts = self.vertices.clone();
        if self.symmetric {
            pts.extend(self.vertices.iter().map(|v| v.iter().map(|x| -x).collect::<Vec<_>>()));
        }
        pts
    }

    pub fn action(&self) -> f64 {
        let pts = self.points();
        let m = pts.len();
        0.5 * (0..m).map(|i| omega(&pts[i], &pts[(i + 1) % m])).sum::<f64>()
    }

    pub fn reversed(&self) -> PolygonalLoop {
        let mut v = self.vertices.clone();
        v.reverse();
        PolygonalLoop { vertices: v, symmetric: self.symmetric }
    }

    pub fn scaled(&self, s: f64) -> PolygonalLoop {
        let v = self.vertices.iter().map(|x| x.iter().map(|c| c * s).collect()).collect();
        PolygonalLoop { vertices: v, symmetric: self.symmetric }
    }

    /// Inserts the midpoint of every edge; the polygon as a set is unchanged.
    pub fn subdivided(&self) -> PolygonalLoop {
        let pts = self.points();
        let m = pts.len();
        let mut out = Vec::with_capacity(2 * m);
        for i in 0..m {
            out.push(pts[i].clone());
            out.push(pts[i].iter().zip(&pts[(i + 1) % m]).map(|(a, b)| 0.5 * (a + b)).collect());
        }
        if self.symmetric {
            out.truncate(m);
        }
        PolygonalLoop { vertices: out, symmetric: self.symmetric }
    }
}

/// An isotropic line `L = span(ℓ)`, `ℓ = (0, u)` in the q-subspace, with
/// `L^ω = {(p, q) : ⟨u, p⟩ = 0}` and a symplectic basis of `L^ω / L`.
///
/// The quotient basis is `P_i = (b_i, 0)`, `Q_j = (0, e_j)` where the `b_i`
/// are the [`HyperplaneFrame`] basis of `u^⊥` and `j` runs over the
/// non-pivot indices. Then `ω(P_i, Q_j) = δ_ij`, and a point of `L^ω` has
/// quotient coordinates `(y, w)` with `p = B y` and `w = Bᵀ q`.
#[derive(Clone, Debug)]
pub struct ReductionSpec {
    n: usize,
    line: Vec<Q>,
    frame: Arc<HyperplaneFrame>,
}

impl ReductionSpec {
    pub fn half_dim(&self) -> usize {
        self.n
    }

    /// `ℓ ∈ R^{2N}`.
    pub fn line(&self) -> &[Q] {
        &self.line
    }

    pub fn frame(&self) -> &Arc<HyperplaneFrame> {
        &self.frame
    }

    /// Normal `ν` of the hyperplane `L^ω = {x : ⟨ν, x⟩ = 0}`, namely `(u, 0)`.
    pub fn lomega_normal(&self) -> Vec<Q> {
        let u = &self.line[self.n..];
        u.iter().cloned().chain(std::iter::repeat_n(Q::zero(), self.n)).collect()
    }

    pub fn lomega_dim(&self) -> usize {
        2 * self.n - 1
    }

    pub fn in_lomega(&self, x: &[Q]) -> bool {
        exact::dot(&self.lomega_normal(), x).is_zero()
    }

    /// The `2N − 2` vectors `P_1, …, Q_1, …` in `R^{2N}`.
    pub fn quotient_basis(&self) -> QMat {
        let n = self.n;
        let mut out: QMat = self
            .frame
            .basis()
            .iter()
            .map(|b| b.iter().cloned().chain(std::iter::repeat_n(Q::zero(), n)).collect())
            .collect();
        for j in (0..n).filter(|&j| j != self.frame.pivot()) {
            let mut v = vec![Q::zero(); 2 * n];
            v[n + j] = Q::one();
            out.push(v);
        }
        out
    }

    /// Quotient coordinates `(y, w)` of `x ∈ L^ω`.
    pub fn reduce_point(&self, x: &[Q]) -> Result<Vec<Q>> {
        if x.len() != 2 * self.n {
            return Err(Error::DimensionMismatch { expected: 2 * self.n, got: x.len() });
        }
        if !self.in_lomega(x) {
            return Err(Error::InvalidParameter("point is not in the coisotropic hyperplane".into()));
        }
        let (p, q) = x.split_at(self.n);
        let mut out: Vec<Q> = (0..self.n).filter(|&i| i != self.frame.pivot()).map(|i| p[i].clone()).collect();
        out.extend(self.frame.dual_coords(q));
        Ok(out)
    }
}

/// `L^ω` for `L = span(ℓ)`; `ℓ ∈ R^{2N}` must be a nonzero vector of the
/// q-subspace.
pub fn coisotropic_complement(n: usize, ell: &[Q]) -> Result<ReductionSpec> {
    if ell.len() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, got: ell.len() });
    }
    if !exact::is_zero_vec(&ell[..n]) {
        return Err(Error::NotInQSubspace);
    }
    let frame = HyperplaneFrame::new(&ell[n..])?;
    Ok(ReductionSpec { n, line: ell.to_vec(), frame: Arc::new(frame) })
}

/// Spec for the q-direction `u ∈ R^N`.
pub fn q_line(u: &[Q]) -> Result<ReductionSpec> {
    let n = u.len();
    let ell: Vec<Q> = std::iter::repeat_n(Q::zero(), n).chain(u.iter().cloned()).collect();
    coisotropic_complement(n, &ell)
}

/// `S' = (S ∩ L^ω)/L = (K/L) × (K° ∩ L^⊥)` for `L = span(0, u)`.
pub fn reduce_product(s: &LagrangianProduct, u: &[Q]) -> Result<LagrangianProduct> {
    if u.len() != s.n() {
        return Err(Error::DimensionMismatch { expected: s.n(), got: u.len() });
    }
    let spec = q_line(u)?;
    reduce_product_with(s, &spec)
}

pub fn reduce_product_with(s: &LagrangianProduct, spec: &ReductionSpec) -> Result<LagrangianProduct> {
    let frame = spec.frame().clone();
    let base = s.base.projection_in(frame.clone())?.body;
    let dual = s.dual.section_in(frame)?.body;
    LagrangianProduct::from_parts(base, dual)
}

/// Successive one-step reductions; each normal is given in the coordinates
/// of the previous result.
pub fn reduce_product_iterated(s: &LagrangianProduct, normals: &[Vec<Q>]) -> Result<LagrangianProduct> {
    let mut cur = s.clone();
    for u in normals {
        cur = reduce_product(&cur, u)?;
    }
    Ok(cur)
}

/// `K/L` and `K° ∩ L^⊥` in one call, for a body given as `K`.
pub fn reduce_body(k: &ConvexBody, u: &[Q]) -> Result<LagrangianProduct> {
    reduce_product(&LagrangianProduct::new(k.clone()), u)
}

/// Volume of `(B^{2N} ∩ L^ω)/L` in the symplectic quotient basis.
///
/// In the coordinates of `L^ω` spanned by the quotient basis and `ℓ`, the
/// ball is `{xᵀ M x <= 1}` with `M` the Gram matrix; dividing by `L`
/// leaves the Schur complement `Q` of the `ℓ`-entry, and the volume is
/// `π^{N−1}/(N−1)! / sqrt(det Q)`.
pub fn reduce_ball(spec: &ReductionSpec) -> VolumeResult {
    let mut basis = spec.quotient_basis();
    basis.push(spec.line().to_vec());
    let gram: QMat = basis.iter().map(|a| basis.iter().map(|b| exact::dot(a, b)).collect()).collect();
    let k = gram.len() - 1;
    let ll = &gram[k][k];
    let schur: QMat = (0..k)
        .map(|i| (0..k).map(|j| &gram[i][j] - &gram[i][k] * &gram[k][j] / ll).collect())
        .collect();
    let det = exact::det(&schur);
    VolumeResult::closed_form(even_ball_volume(spec.half_dim() - 1) / exact::to_f64(&det).sqrt())
}

/// [`reduce_ball`] for the ball of radius `r`.
pub fn reduce_ball_radius(spec: &ReductionSpec, r: f64) -> VolumeResult {
    let v = reduce_ball(spec);
    VolumeResult::closed_form(v.value * r.powi(2 * (spec.half_dim() as i32 - 1)))
}

/// [`reduce_ball`] through a second basis: an orthonormal basis of `u^⊥`
/// (Gram–Schmidt over the coordinate vectors) for the p-part and the same
/// vectors for the q-part, which is again symplectic. Returns the volume
/// and the largest deviation of `ω` on the basis from the standard form.
pub fn reduce_ball_orthonormal(spec: &ReductionSpec) -> (f64, f64) {
    let n = spec.half_dim();
    let u = exact::vec_to_f64(&spec.line()[n..]);
    let un = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut ortho: Vec<Vec<f64>> = vec![u.iter().map(|x| x / un).collect()];
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for b in &ortho {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 && ortho.len() < n {
            ortho.push(v.iter().map(|x| x / norm).collect());
        }
    }
    let e = &ortho[1..];
    let mut basis: Vec<Vec<f64>> = e.iter().map(|b| b.iter().copied().chain(std::iter::repeat_n(0.0, n)).collect()).collect();
    basis.extend(e.iter().map(|b| std::iter::repeat_n(0.0, n).chain(b.iter().copied()).collect::<Vec<_>>()));
    let k = basis.len();
    let mut dev: f64 = 0.0;
    for i in 0..k {
        for jx in 0..k {
            let want = if jx == i + n - 1 && i < n - 1 {
                1.0
            } else if i == jx + n - 1 && jx < n - 1 {
                -1.0
            } else {
                0.0
            };
            dev = dev.max((omega(&basis[i], &basis[jx]) - want).abs());
        }
    }
    // orthonormal vectors orthogonal to ℓ: the quotient form is the identity
    let gram = nalgebra::DMatrix::from_fn(k, k, |i, jx| basis[i].iter().zip(&basis[jx]).map(|(a, b)| a * b).sum::<f64>());
    (even_ball_volume(n - 1) / gram.determinant().sqrt(), dev)
}
