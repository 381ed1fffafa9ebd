//! Exact polytope volume by a pulling triangulation.
//!
//! The body is coned from the origin over its facets; each facet is
//! triangulated by pulling its lexicographically smallest vertex and
//! recursing into the faces that avoid it. Faces are vertex-index sets, and
//! the facets of a face `F` are the maximal proper sets `F ∩ G` over the
//! facets `G` of the polytope, so no rank computation is needed.

use std::collections::BTreeSet;

use num::{Signed, Zero};

use crate::bodies::Polytope;
use crate::exact::{self, Q};

pub fn polytope_volume(p: &Polytope) -> Q {
    let d = p.dim();
    let verts = p.vertices();
    let facet_sets = p.incidence();
    let mut total = Q::zero();
    let mut simplex = Vec::with_capacity(d);
    for f in facet_sets {
        for_each_simplex(f, d - 1, facet_sets, &mut simplex, &mut |s| {
            let m: Vec<Vec<Q>> = s.iter().map(|&i| verts[i].clone()).collect();
            total += exact::det(&m).abs();
        });
    }
    total / Q::from_integer(exact::factorial(d))
}

/// Calls `emit` with `prefix ++ σ` for every simplex `σ` of the pulling
/// triangulation of `face` (of dimension `k`).
fn for_each_simplex(face: &[usize], k: usize, facets: &[Vec<usize>], prefix: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    // vertex indices follow lexicographic order, so face[0] is the apex
    let apex = face[0];
    prefix.push(apex);
    if k == 0 {
        debug_assert_eq!(face.len(), 1);
        emit(prefix);
    } else {
        for sub in subfacets(face, facets) {
            if sub.binary_search(&apex).is_err() {
                for_each_simplex(&sub, k - 1, facets, prefix, emit);
            }
        }
    }
    prefix.pop();
}

fn subfacets(face: &[usize], facets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let cands: BTreeSet<Vec<usize>> = facets
        .iter()
        .map(|g| intersect(face, g))
        .filter(|s| !s.is_empty() && s.len() < face.len())
        .collect();
    let cands: Vec<Vec<usize>> = cands.into_iter().collect();
    cands
        .iter()
        .filter(|s| !cands.iter().any(|t| t.len() > s.len() && is_subset(s, t)))
        .cloned()
        .collect()
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    intersect(a, b).len() == a.len()
}
