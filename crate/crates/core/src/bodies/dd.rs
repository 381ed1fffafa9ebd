//! Double-description vertex enumeration over the integers.
//!
//! Input is a system `a_i · x <= 1` describing a bounded polyhedron with the
//! origin in its interior. It is homogenized to the cone
//! `{(t, x) : t - a_i · x >= 0}` whose extreme rays are `(1, v)` for the
//! vertices `v`. Constraints are inserted one at a time and rays are kept
//! as primitive integer vectors; adjacency uses the combinatorial test.

use num::bigint::BigInt;
use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, primitive, primitive_int, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn new(bits: usize) -> Self {
        ZeroSet(vec![0; bits.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn and(&self, other: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn contains_all(&self, other: &ZeroSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

struct Ray {
    coords: Vec<BigInt>,
    zeros: ZeroSet,
}

fn int_dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Vertices of `{x : a · x <= 1 for every row a}`, sorted lexicographically.
///
/// Fails with [`Error::Unbounded`] when the rows do not describe a bounded
/// set with the origin in the interior.
pub fn enumerate_vertices(dim: usize, rows: &[Vec<Q>]) -> Result<Vec<Vec<Q>>> {
    let d = dim + 1;
    let m = rows.len();
    for r in rows {
        if r.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: r.len() });
        }
    }
    let cons: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|a| {
            let mut c = Vec::with_capacity(d);
            c.push(Q::from_integer(1.into()));
            c.extend(a.iter().map(|x| -x));
            primitive(&c)
        })
        .collect();

    // greedy initial basis
    let mut basis: Vec<usize> = Vec::with_capacity(d);
    let mut basis_rows: Vec<Vec<Q>> = Vec::with_capacity(d);
    for (i, c) in cons.iter().enumerate() {
        if basis.len() == d {
            break;
        }
        basis_rows.push(c.iter().map(|x| Q::from_integer(x.clone())).collect());
        if exact::rank(&basis_rows) == basis_rows.len() {
            basis.push(i);
        } else {
            basis_rows.pop();
        }
    }
    if basis.len() < d {
        return Err(Error::Unbounded);
    }
    let inv = exact::inverse(&basis_rows).ok_or(Error::Unbounded)?;
    let mut rays: Vec<Ray> = (0..d)
        .map(|j| {
            let col: Vec<Q> = inv.iter().map(|r| r[j].clone()).collect();
            let mut zeros = ZeroSet::new(m);
            for (k, &b) in basis.iter().enumerate() {
                if k != j {
                    zeros.insert(b);
                }
            }
            Ray { coords: primitive(&col), zeros }
        })
        .collect();

    let mut in_basis = vec![false; m];
    for &b in &basis {
        in_basis[b] = true;
    }
    for i in (0..m).filter(|&i| !in_basis[i]) {
        let vals: Vec<BigInt> = rays.iter().map(|r| int_dot(&cons[i], &r.coords)).collect();
        if vals.iter().all(|v| !v.is_negative()) {
            for (r, v) in rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.zeros.insert(i);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zeros.and(&rays[n].zeros);
                if common.len() + 2 < d {
                    continue;
                }
                let adjacent = !rays
                    .iter()
                    .enumerate()
                    .any(|(k, r)| k != p && k != n && r.zeros.contains_all(&common));
                if !adjacent {
                    continue;
                }
                let a = &vals[p];
                let b = -&vals[n];
                let coords: Vec<BigInt> = rays[n]
                    .coords
                    .iter()
                    .zip(&rays[p].coords)
                    .map(|(x, y)| a * x + &b * y)
                    .collect();
                let mut zeros = common;
                zeros.insert(i);
                next.push(Ray { coords: primitive_int(coords), zeros });
            }
        }
        for (k, mut r) in std::mem::take(&mut rays).into_iter().enumerate() {
            if vals[k].is_negative() {
                continue;
            }
            if vals[k].is_zero() {
                r.zeros.insert(i);
            }
            next.push(r);
        }
        rays = next;
    }

    let mut out = Vec::with_capacity(rays.len());
    for r in rays {
        let t = &r.coords[0];
        if !t.is_positive() {
            return Err(Error::Unbounded);
        }
        let tq = Q::from_integer(t.clone());
        out.push(r.coords[1..].iter().map(|x| Q::from_integer(x.clone()) / &tq).collect::<Vec<Q>>());
    }
    out.sort();
    out.dedup();
    Ok(out)
}
