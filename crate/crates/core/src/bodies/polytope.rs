use std::collections::HashSet;
use std::sync::OnceLock;

use num::{One, Signed, Zero};

use super::dd::enumerate_vertices;
use super::frame::HyperplaneFrame;
use crate::error::{Error, Result};
use crate::exact::{self, dot, neg_vec, to_f64, Q, QMat};

/// A centrally symmetric polytope holding both of its representations.
///
/// Facets are stored as normals `a` of the inequalities `a · x <= 1`; this
/// is always possible because the origin is interior. In that normalization
/// the facet normals of `P` are exactly the vertices of the polar `P°`, so
/// polarity is a swap of the two lists.
#[derive(Debug)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<Q>>,
    facets: Vec<Vec<Q>>,
    vertices_f64: Vec<Vec<f64>>,
    facets_f64: Vec<Vec<f64>>,
    incidence: OnceLock<Vec<Vec<usize>>>,
}

impl Clone for Polytope {
    fn clone(&self) -> Self {
        Polytope::from_parts(self.dim, self.vertices.clone(), self.facets.clone())
    }
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices && self.facets == other.facets
    }
}

fn check_closed_under_negation(points: &[Vec<Q>], what: &str) -> Result<()> {
    let set: HashSet<&Vec<Q>> = points.iter().collect();
    for p in points {
        if !set.contains(&neg_vec(p)) {
            return Err(Error::NotSymmetric(format!("{what} set not closed under x -> -x")));
        }
    }
    Ok(())
}

impl Polytope {
    /// Trusted constructor: both lists must already be irredundant and sorted
    /// consistently with what `from_h`/`from_v` would produce.
    pub(crate) fn from_parts(dim: usize, mut vertices: Vec<Vec<Q>>, mut facets: Vec<Vec<Q>>) -> Self {
        vertices.sort();
        vertices.dedup();
        facets.sort();
        facets.dedup();
        let vertices_f64 = vertices.iter().map(|v| exact::vec_to_f64(v)).collect();
        let facets_f64 = facets.iter().map(|v| exact::vec_to_f64(v)).collect();
        Polytope { dim, vertices, facets, vertices_f64, facets_f64, incidence: OnceLock::new() }
    }

    /// `{x : a_i · x <= 1}` for the given rows.
    pub fn from_h(dim: usize, rows: &[Vec<Q>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        let vertices = enumerate_vertices(dim, rows)?;
        check_closed_under_negation(&vertices, "vertex")?;
        let facets = enumerate_vertices(dim, &vertices)?;
        Ok(Self::from_parts(dim, vertices, facets))
    }

    /// Convex hull of the given points.
    pub fn from_v(dim: usize, points: &[Vec<Q>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Malformed("dimension must be positive".into()));
        }
        let facets = enumerate_vertices(dim, points)?;
        check_closed_under_negation(&facets, "facet")?;
        let vertices = enumerate_vertices(dim, &facets)?;
        Ok(Self::from_parts(dim, vertices, facets))
    }

    pub fn cube(n: usize) -> Self {
        Self::from_parts(n, sign_vectors(n), unit_vectors(n))
    }

    pub fn cross(n: usize) -> Self {
        Self::from_parts(n, unit_vectors(n), sign_vectors(n))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<Q>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Vec<Q>] {
        &self.facets
    }

    pub fn vertices_f64(&self) -> &[Vec<f64>] {
        &self.vertices_f64
    }

    pub fn polar(&self) -> Polytope {
        Self::from_parts(self.dim, self.facets.clone(), self.vertices.clone())
    }

    /// For every facet, the sorted indices of the vertices lying on it.
    pub fn incidence(&self) -> &[Vec<usize>] {
        self.incidence.get_or_init(|| {
            self.facets
                .iter()
                .map(|a| {
                    (0..self.vertices.len())
                        .filter(|&i| dot(a, &self.vertices[i]).is_one())
                        .collect()
                })
                .collect()
        })
    }

    pub fn gauge_exact(&self, x: &[Q]) -> Q {
        self.facets.iter().map(|a| dot(a, x)).fold(Q::zero(), |m, v| if v > m { v } else { m })
    }

    pub fn support_exact(&self, u: &[Q]) -> Q {
        self.vertices.iter().map(|v| dot(v, u)).fold(Q::zero(), |m, s| if s > m { s } else { m })
    }

    pub fn gauge(&self, x: &[f64]) -> f64 {
        max_dot(&self.facets_f64, x)
    }

    pub fn support(&self, u: &[f64]) -> f64 {
        max_dot(&self.vertices_f64, u)
    }

    /// Maximizing vertex of `u`, ties broken toward the lexicographically
    /// smallest vertex.
    pub fn support_vertex(&self, u: &[f64]) -> &[f64] {
        let best = max_dot(&self.vertices_f64, u);
        let scale = self.circumradius() * u.iter().map(|x| x.abs()).sum::<f64>();
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        self.vertices_f64
            .iter()
            .find(|v| fdot(v, u) >= best - tol)
            .expect("polytope has vertices")
    }

    pub fn circumradius(&self) -> f64 {
        self.vertices_f64
            .iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Image under an invertible rational matrix.
    pub fn linear_image(&self, m: &[Vec<Q>]) -> Result<Polytope> {
        let inv = exact::inverse(m).ok_or(Error::SingularMatrix)?;
        let vertices = self.vertices.iter().map(|v| exact::mat_vec(m, v)).collect();
        // a · x <= 1 with x = M^{-1} y  <=>  (M^{-T} a) · y <= 1
        let inv_t = exact::transpose(&inv);
        let facets = self.facets.iter().map(|a| exact::mat_vec(&inv_t, a)).collect();
        Ok(Self::from_parts(self.dim, vertices, facets))
    }

    /// Section by `u^⊥`, in the frame's coordinates.
    pub fn section(&self, frame: &HyperplaneFrame) -> Result<Polytope> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter("cannot slice a 1-dimensional body".into()));
        }
        let rows: Vec<Vec<Q>> = self.facets.iter().map(|a| frame.dual_coords(a)).collect();
        Polytope::from_h(self.dim - 1, &rows)
    }

    /// Projection along `u`, realized as the polar of the section of the polar.
    pub fn projection(&self, frame: &HyperplaneFrame) -> Result<Polytope> {
        Ok(self.polar().section(frame)?.polar())
    }

    /// Projection computed directly as the hull of the projected vertices.
    pub fn projection_by_vertices(&self, frame: &HyperplaneFrame) -> Result<Polytope> {
        if self.dim < 2 {
            return Err(Error::InvalidParameter("cannot project a 1-dimensional body".into()));
        }
        let pts: Vec<Vec<Q>> = self.vertices.iter().map(|v| frame.dual_coords(v)).collect();
        Polytope::from_v(self.dim - 1, &pts)
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &Polytope) -> Polytope {
        let (n, m) = (self.dim, other.dim);
        let mut vertices = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for a in &self.vertices {
            for b in &other.vertices {
                vertices.push(a.iter().chain(b).cloned().collect());
            }
        }
        let facets = pad_blocks(&self.facets, &other.facets, n, m);
        Self::from_parts(n + m, vertices, facets)
    }

    /// ℓ1-sum `conv(self ∪ other)` in orthogonal subspaces; polar of the product of polars.
    pub fn l1_sum(&self, other: &Polytope) -> Polytope {
        self.polar().product(&other.polar()).polar()
    }

    pub fn is_symmetric(&self) -> bool {
        check_closed_under_negation(&self.vertices, "vertex").is_ok()
            && check_closed_under_negation(&self.facets, "facet").is_ok()
    }

    /// Exact equality as point sets (both representations are canonical).
    pub fn same_set(&self, other: &Polytope) -> bool {
        self == other
    }

    pub fn bounding_box(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.vertices.iter().map(|v| v[i].abs()).max().map(|x| to_f64(&x)).unwrap_or(0.0))
            .collect()
    }
}

fn pad_blocks(a: &[Vec<Q>], b: &[Vec<Q>], n: usize, m: usize) -> QMat {
    let mut out = Vec::with_capacity(a.len() + b.len());
    for x in a {
        let mut r = x.clone();
        r.extend(std::iter::repeat_n(Q::zero(), m));
        out.push(r);
    }
    for y in b {
        let mut r = vec![Q::zero(); n];
        r.extend(y.iter().cloned());
        out.push(r);
    }
    out
}

fn unit_vectors(n: usize) -> QMat {
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1i64, -1] {
            let mut v = vec![Q::zero(); n];
            v[i] = exact::q(s);
            out.push(v);
        }
    }
    out
}

fn sign_vectors(n: usize) -> QMat {
    (0..1usize << n)
        .map(|mask| (0..n).map(|i| exact::q(if mask >> i & 1 == 1 { -1 } else { 1 })).collect())
        .collect()
}

pub(crate) fn fdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_dot(rows: &[Vec<f64>], x: &[f64]) -> f64 {
    rows.iter().map(|r| fdot(r, x)).fold(0.0, f64::max)
}
