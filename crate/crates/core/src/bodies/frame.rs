use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, dot, Q, Surd};

/// A rational basis of the hyperplane `u^⊥` and the matching coordinates on
/// the quotient `R^n / span(u)`.
///
/// The pivot `k` is the first index of maximal `|u_k|`; the basis vectors are
/// `b_j = e_j - (u_j / u_k) e_k` for `j != k`, in increasing `j`. Points of
/// `u^⊥` get coordinates `y` with `x = B y`, and classes in the quotient get
/// the coordinates `w = Bᵀ z`. With this pairing `⟨B y, z⟩ = y · w`, so the
/// polar of a section is literally the projection of the polar, and the
/// reduced symplectic form stays standard.
///
/// The basis is not orthonormal. Volumes measured in these coordinates differ
/// from Euclidean ones by `sqrt(det G)` (sections) or `1/sqrt(det G)`
/// (projections), `G = BᵀB`; products of the two are unaffected.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperplaneFrame {
    normal: Vec<Q>,
    pivot: usize,
    /// columns `b_j`, each of length `n`
    basis: Vec<Vec<Q>>,
    gram_det: Q,
    normal_f64: Vec<f64>,
    basis_f64: Vec<Vec<f64>>,
}

impl HyperplaneFrame {
    pub fn new(u: &[Q]) -> Result<Self> {
        let n = u.len();
        if exact::is_zero_vec(u) {
            return Err(Error::ZeroNormal);
        }
        if n < 2 {
            return Err(Error::InvalidParameter("hyperplane frame needs dimension >= 2".into()));
        }
        let mut pivot = 0;
        for i in 1..n {
            if u[i].abs() > u[pivot].abs() {
                pivot = i;
            }
        }
        let basis: Vec<Vec<Q>> = (0..n)
            .filter(|&j| j != pivot)
            .map(|j| {
                let mut b = vec![Q::zero(); n];
                b[j] = exact::q(1);
                b[pivot] = -(&u[j] / &u[pivot]);
                b
            })
            .collect();
        let gram: Vec<Vec<Q>> = basis.iter().map(|a| basis.iter().map(|b| dot(a, b)).collect()).collect();
        let gram_det = exact::det(&gram);
        Ok(HyperplaneFrame {
            normal: u.to_vec(),
            pivot,
            normal_f64: exact::vec_to_f64(u),
            basis_f64: basis.iter().map(|b| exact::vec_to_f64(b)).collect(),
            basis,
            gram_det,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &[Q] {
        &self.normal
    }

    pub fn normal_f64(&self) -> &[f64] {
        &self.normal_f64
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn gram_det(&self) -> &Q {
        &self.gram_det
    }

    /// `B y`.
    pub fn lift(&self, y: &[Q]) -> Vec<Q> {
        let mut x = vec![Q::zero(); self.ambient_dim()];
        for (b, c) in self.basis.iter().zip(y) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += bi * c;
            }
        }
        x
    }

    /// `Bᵀ z`.
    pub fn dual_coords(&self, z: &[Q]) -> Vec<Q> {
        self.basis.iter().map(|b| dot(b, z)).collect()
    }

    pub fn lift_f64(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.ambient_dim()];
        self.lift_f64_into(y, &mut x);
        x
    }

    pub fn lift_f64_into(&self, y: &[f64], x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v = 0.0);
        for (b, c) in self.basis_f64.iter().zip(y) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += bi * c;
            }
        }
    }

    pub fn dual_coords_f64(&self, z: &[f64]) -> Vec<f64> {
        self.basis_f64.iter().map(|b| b.iter().zip(z).map(|(p, q)| p * q).sum()).collect()
    }

    /// Some `z` with `Bᵀ z = w`: the pivot coordinate is set to zero.
    pub fn preimage_f64_into(&self, w: &[f64], z: &mut [f64]) {
        let mut it = w.iter();
        for (i, zi) in z.iter_mut().enumerate() {
            *zi = if i == self.pivot { 0.0 } else { *it.next().expect("length n-1") };
        }
    }

    /// Drops the pivot coordinate, which inverts `lift` on `u^⊥`.
    pub fn drop_pivot(&self, x: &[f64]) -> Vec<f64> {
        x.iter().enumerate().filter(|(i, _)| *i != self.pivot).map(|(_, v)| *v).collect()
    }

    /// Factor turning section volumes in frame coordinates into Euclidean ones.
    pub fn section_volume_factor(&self) -> Surd {
        Surd::new(exact::q(1), self.gram_det.clone())
    }

    /// Factor turning projection volumes in frame coordinates into Euclidean ones.
    pub fn projection_volume_factor(&self) -> Surd {
        Surd::new(exact::q(1), self.gram_det.recip())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::q;

    #[test]
    fn basis_is_orthogonal_to_normal() {
        let u = vec![q(1), q(-2), q(3)];
        let f = HyperplaneFrame::new(&u).unwrap();
        assert_eq!(f.pivot(), 2);
        for b in f.basis() {
            assert!(dot(b, &u).is_zero());
        }
        let y = vec![q(5), q(-7)];
        let z = vec![q(2), q(1), q(-4)];
        // pairing identity
        assert_eq!(dot(&f.lift(&y), &z), dot(&y, &f.dual_coords(&z)));
    }

    #[test]
    fn diagonal_gram() {
        let f = HyperplaneFrame::new(&[q(1), q(1), q(1)]).unwrap();
        assert_eq!(f.gram_det(), &q(3));
        assert!(HyperplaneFrame::new(&[q(0), q(0)]).is_err());
    }
}
