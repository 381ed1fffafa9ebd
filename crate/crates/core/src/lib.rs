//! Exact convex bodies, Mahler volume products, linear symplectic reduction
//! of Lagrangian products and numerical checks around them.

pub mod bodies;
pub mod capacity;
pub mod crofton;
pub mod embedding;
pub mod error;
pub mod exact;
pub mod quadrature;
pub mod sampling;
pub mod suites;
pub mod symplectic;
pub mod volume;

// The guide's Rust snippets run as doc-tests, so the book cannot drift from
// the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bodies.md")]
    mod bodies {}
    #[doc = include_str!("../../../book/src/volume.md")]
    mod volume {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/capacity.md")]
    mod capacity {}
    #[doc = include_str!("../../../book/src/crofton.md")]
    mod crofton {}
    #[doc = include_str!("../../../book/src/embedding.md")]
    mod embedding {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
