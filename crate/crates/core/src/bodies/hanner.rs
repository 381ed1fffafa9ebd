//! Hanner polytopes as expression trees over segments.
//!
//! Syntax: `S` is the segment `[-1, 1]`, `X(a, b, ...)` the Cartesian
//! product and `L(a, b, ...)` the ℓ1-sum of the arguments.

use std::fmt;

use rand::Rng;

use super::polytope::Polytope;
use crate::error::{Error, Result};
use crate::exact::q;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HannerTree {
    Segment,
    Product(Vec<HannerTree>),
    L1Sum(Vec<HannerTree>),
}

impl HannerTree {
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let t = parse_expr(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::Malformed(format!("trailing input in hanner expression {s:?}")));
        }
        Ok(t)
    }

    /// Number of segment leaves, which is the dimension.
    pub fn dim(&self) -> usize {
        match self {
            HannerTree::Segment => 1,
            HannerTree::Product(c) | HannerTree::L1Sum(c) => c.iter().map(HannerTree::dim).sum(),
        }
    }

    /// `(vertices, facets)`: vertices multiply under products and add under
    /// ℓ1-sums; facets the other way around.
    pub fn counts(&self) -> (u64, u64) {
        match self {
            HannerTree::Segment => (2, 2),
            HannerTree::Product(c) => c.iter().map(HannerTree::counts).fold((1, 0), |(v, f), (cv, cf)| (v * cv, f + cf)),
            HannerTree::L1Sum(c) => c.iter().map(HannerTree::counts).fold((0, 1), |(v, f), (cv, cf)| (v + cv, f * cf)),
        }
    }

    pub fn polar(&self) -> HannerTree {
        match self {
            HannerTree::Segment => HannerTree::Segment,
            HannerTree::Product(c) => HannerTree::L1Sum(c.iter().map(HannerTree::polar).collect()),
            HannerTree::L1Sum(c) => HannerTree::Product(c.iter().map(HannerTree::polar).collect()),
        }
    }

    pub fn to_polytope(&self) -> Polytope {
        match self {
            HannerTree::Segment => Polytope::from_parts(1, vec![vec![q(1)], vec![q(-1)]], vec![vec![q(1)], vec![q(-1)]]),
            HannerTree::Product(c) => {
                let mut it = c.iter().map(HannerTree::to_polytope);
                let first = it.next().expect("non-empty product");
                it.fold(first, |acc, p| acc.product(&p))
            }
            HannerTree::L1Sum(c) => {
                let mut it = c.iter().map(HannerTree::to_polytope);
                let first = it.next().expect("non-empty sum");
                it.fold(first, |acc, p| acc.l1_sum(&p))
            }
        }
    }

    /// A random binary tree with the given number of leaves.
    pub fn random<R: Rng + ?Sized>(leaves: usize, rng: &mut R) -> HannerTree {
        assert!(leaves >= 1);
        if leaves == 1 {
            return HannerTree::Segment;
        }
        let left = rng.random_range(1..leaves);
        let a = HannerTree::random(left, rng);
        let b = HannerTree::random(leaves - left, rng);
        if rng.random_bool(0.5) {
            HannerTree::Product(vec![a, b])
        } else {
            HannerTree::L1Sum(vec![a, b])
        }
    }
}

impl fmt::Display for HannerTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (tag, children) = match self {
            HannerTree::Segment => return write!(f, "S"),
            HannerTree::Product(c) => ("X", c),
            HannerTree::L1Sum(c) => ("L", c),
        };
        write!(f, "{tag}(")?;
        for (i, c) in children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

fn parse_expr(s: &[char], pos: &mut usize) -> Result<HannerTree> {
    let err = |msg: &str, at: usize| Error::Malformed(format!("hanner expression: {msg} at offset {at}"));
    match s.get(*pos) {
        Some('S') => {
            *pos += 1;
            Ok(HannerTree::Segment)
        }
        Some(&c @ ('X' | 'L')) => {
            *pos += 1;
            if s.get(*pos) != Some(&'(') {
                return Err(err("expected '('", *pos));
            }
            *pos += 1;
            let mut children = vec![parse_expr(s, pos)?];
            loop {
                match s.get(*pos) {
                    Some(',') => {
                        *pos += 1;
                        children.push(parse_expr(s, pos)?);
                    }
                    Some(')') => {
                        *pos += 1;
                        break;
                    }
                    _ => return Err(err("expected ',' or ')'", *pos)),
                }
            }
            Ok(if c == 'X' { HannerTree::Product(children) } else { HannerTree::L1Sum(children) })
        }
        _ => Err(err("expected S, X or L", *pos)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_and_display() {
        let t = HannerTree::parse("X(S, L(S,S))").unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.to_string(), "X(S,L(S,S))");
        assert!(HannerTree::parse("X(S").is_err());
        assert!(HannerTree::parse("Q").is_err());
        assert!(HannerTree::parse("S S").is_err());
    }

    #[test]
    fn counts_of_basic_trees() {
        assert_eq!(HannerTree::parse("X(S,S,S)").unwrap().counts(), (8, 6));
        assert_eq!(HannerTree::parse("L(S,S,S)").unwrap().counts(), (6, 8));
        assert_eq!(HannerTree::parse("X(S,L(S,S))").unwrap().counts(), (8, 6));
    }

    #[test]
    fn counts_match_hull_of_the_vertex_set() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for leaves in 1..=6 {
            for _ in 0..4 {
                let t = HannerTree::random(leaves, &mut rng);
                let direct = t.to_polytope();
                let hull = Polytope::from_v(t.dim(), direct.vertices()).unwrap();
                let (v, f) = t.counts();
                assert_eq!(hull.vertices().len() as u64, v, "{t}");
                assert_eq!(hull.facets().len() as u64, f, "{t}");
                assert_eq!(direct, hull);
            }
        }
    }
}
