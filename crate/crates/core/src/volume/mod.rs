//! Volumes and volume products.
//!
//! Polytopes get exact rational volumes; ℓp balls a closed form; linear
//! images, products and ℓ1-sums are reduced to their parts; everything else
//! (functional sections and projections) is measured by hit-or-miss Monte
//! Carlo in the bounding box.

mod exact;
mod mc;

use num::Signed;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

pub use self::exact::polytope_volume;
pub use mc::mc_volume;

use crate::bodies::{ConvexBody, HannerTree, LagrangianProduct, Rep, Slice};
use crate::error::{Error, Result};
use crate::exact::{self as ex, Q, Surd};
use crate::sampling::derive_seed;
use crate::symplectic;

/// Largest dimension handled by exact triangulation.
pub const MAX_EXACT_DIM: usize = 8;

/// Normal quantile used for the reported confidence half-widths.
pub const Z95: f64 = 1.96;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    ClosedForm,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeResult {
    pub value: f64,
    /// Exact value when known, possibly with one square root.
    pub exact: Option<Surd>,
    pub method: Method,
    /// `Z95 · std_error`, zero unless sampled.
    pub ci_halfwidth: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: Option<u64>,
}

impl VolumeResult {
    pub fn exact(x: Surd) -> Self {
        VolumeResult {
            value: x.to_f64(),
            exact: Some(x),
            method: Method::Exact,
            ci_halfwidth: 0.0,
            std_error: 0.0,
            samples: 0,
            seed: None,
        }
    }

    pub fn closed_form(value: f64) -> Self {
        VolumeResult { value, exact: None, method: Method::ClosedForm, ci_halfwidth: 0.0, std_error: 0.0, samples: 0, seed: None }
    }

    pub fn exact_rational(&self) -> Option<&Q> {
        self.exact.as_ref().and_then(Surd::as_rational)
    }

    /// Multiplies by a non-negative exact constant.
    pub fn scaled(&self, k: &Surd) -> VolumeResult {
        let kf = k.to_f64();
        VolumeResult {
            value: self.value * kf,
            exact: self.exact.as_ref().map(|x| x.mul(k)),
            ci_halfwidth: self.ci_halfwidth * kf,
            std_error: self.std_error * kf,
            ..self.clone()
        }
    }

    /// `k · self · other`, propagating standard errors to first order.
    fn combine(&self, other: &VolumeResult, k: &Q) -> VolumeResult {
        let kf = ex::to_f64(k);
        let se = kf * ((other.value * self.std_error).powi(2) + (self.value * other.std_error).powi(2)).sqrt();
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a.mul(b).scale(k)),
            _ => None,
        };
        VolumeResult {
            value: kf * self.value * other.value,
            exact,
            method: self.method.max(other.method),
            ci_halfwidth: Z95 * se,
            std_error: se,
            samples: self.samples + other.samples,
            seed: self.seed.or(other.seed),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VolumeConfig {
    pub samples: u64,
    pub seed: u64,
}

impl Default for VolumeConfig {
    fn default() -> Self {
        VolumeConfig { samples: 1_000_000, seed: 0 }
    }
}

/// Exact volume of a polytope body.
pub fn exact_polytope_volume(k: &ConvexBody) -> Result<VolumeResult> {
    if k.dim() > MAX_EXACT_DIM {
        return Err(Error::DimensionTooLarge(k.dim(), MAX_EXACT_DIM));
    }
    let p = match k.as_polytope() {
        Some(p) => std::borrow::Cow::Borrowed(p),
        None => std::borrow::Cow::Owned(k.exact_polytope().ok_or(Error::NotPolytope("exact volume needs a polytope"))?),
    };
    Ok(VolumeResult::exact(Surd::rational(polytope_volume(&p))))
}

/// `2^n Γ(1 + 1/p)^n / Γ(1 + n/p)`.
pub fn lp_ball_volume(p: f64, n: usize) -> Result<VolumeResult> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::ExponentBelowOne(p));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let nf = n as f64;
    if p.is_infinite() {
        return Ok(VolumeResult::exact(Surd::rational(ex::q(1 << n))));
    }
    if p == 1.0 {
        return Ok(VolumeResult::exact(Surd::rational(Q::new((1u64 << n).into(), ex::factorial(n)))));
    }
    let ln = nf * (2f64.ln() + ln_gamma(1.0 + 1.0 / p)) - ln_gamma(1.0 + nf / p);
    Ok(VolumeResult::closed_form(ln.exp()))
}

/// Volume by the best available method.
pub fn volume(k: &ConvexBody, cfg: &VolumeConfig) -> Result<VolumeResult> {
    match k.rep() {
        Rep::Polytope(_) | Rep::Hanner { .. } if k.dim() <= MAX_EXACT_DIM => exact_polytope_volume(k),
        Rep::LpBall { p, .. } => lp_ball_volume(*p, k.dim()),
        Rep::LinearImage { parent, map } => {
            let det = map.det().abs();
            Ok(volume(parent, cfg)?.scaled(&Surd::rational(det)))
        }
        Rep::Product(a, b) => {
            let (va, vb) = split_volumes(a, b, cfg)?;
            Ok(va.combine(&vb, &ex::q(1)))
        }
        Rep::L1Sum(a, b) => {
            // conv(A ∪ B) = ⋃ (1-t)A × tB; the t-integral is a Beta function
            let (va, vb) = split_volumes(a, b, cfg)?;
            let k = Q::new(ex::factorial(a.dim()) * ex::factorial(b.dim()), ex::factorial(a.dim() + b.dim()));
            Ok(va.combine(&vb, &k))
        }
        _ => mc_volume(k, cfg.samples, cfg.seed),
    }
}

fn split_volumes(a: &ConvexBody, b: &ConvexBody, cfg: &VolumeConfig) -> Result<(VolumeResult, VolumeResult)> {
    let ca = VolumeConfig { seed: derive_seed(cfg.seed, 1), ..*cfg };
    let cb = VolumeConfig { seed: derive_seed(cfg.seed, 2), ..*cfg };
    Ok((volume(a, &ca)?, volume(b, &cb)?))
}

/// Euclidean volume of a section or projection in `u^⊥`.
pub fn slice_volume(s: &Slice, cfg: &VolumeConfig) -> Result<VolumeResult> {
    Ok(volume(&s.body, cfg)?.scaled(&s.euclidean_volume_factor()))
}

#[derive(Clone, Debug, Serialize)]
pub struct MahlerReport {
    pub dim: usize,
    pub vol_k: VolumeResult,
    pub vol_kpolar: VolumeResult,
    pub product: f64,
    pub product_exact: Option<Surd>,
    /// `Z95 · σ` of the product, from both volumes' standard errors.
    pub product_ci_halfwidth: f64,
    pub bound: f64,
    #[serde(serialize_with = "ex::ser_q")]
    pub bound_exact: Q,
    pub ratio: f64,
    pub ratio_exact: Option<Surd>,
}

impl MahlerReport {
    /// `product >= bound - sigmas · product_ci_halfwidth`, exactly when both
    /// volumes are exact.
    pub fn respects_bound(&self, ci_multiples: f64) -> bool {
        match &self.product_exact {
            Some(p) if p.as_rational().is_some() => p.as_rational().unwrap() >= &self.bound_exact,
            Some(p) => p.squared() >= &self.bound_exact * &self.bound_exact,
            None => self.product >= self.bound - ci_multiples * self.product_ci_halfwidth,
        }
    }
}

/// `vol K · vol K°` against `4^n / n!`.
pub fn mahler_product(k: &ConvexBody, cfg: &VolumeConfig) -> Result<MahlerReport> {
    let vk = volume(k, &VolumeConfig { seed: derive_seed(cfg.seed, 10), ..*cfg })?;
    let vp = volume(&k.polar(), &VolumeConfig { seed: derive_seed(cfg.seed, 11), ..*cfg })?;
    let both = vk.combine(&vp, &ex::q(1));
    let bound_exact = ex::mahler_bound(k.dim());
    let bound = ex::to_f64(&bound_exact);
    let ratio_exact = both.exact.as_ref().map(|p| p.scale(&bound_exact.recip()));
    Ok(MahlerReport {
        dim: k.dim(),
        product: both.value,
        product_ci_halfwidth: both.ci_halfwidth,
        ratio: ratio_exact.as_ref().map(Surd::to_f64).unwrap_or(both.value / bound),
        product_exact: both.exact,
        ratio_exact,
        bound,
        bound_exact,
        vol_k: vk,
        vol_kpolar: vp,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionBoundReport {
    pub n: usize,
    #[serde(serialize_with = "ex::ser_q")]
    pub vol_s: Q,
    /// `vol S'` for `S' = (K/L) × (K° ∩ L^⊥)`.
    #[serde(serialize_with = "ex::ser_q")]
    pub lhs: Q,
    /// `(n / A) · vol S`.
    #[serde(serialize_with = "ex::ser_q")]
    pub rhs: Q,
    pub holds: bool,
    pub equality: bool,
}

/// Compares `vol S'` with `(n/A) vol S` for `S = K × K°`, exactly.
pub fn reduction_volume_bound(k: &ConvexBody, u: &[Q], action: &Q) -> Result<ReductionBoundReport> {
    if !k.is_polytope() {
        return Err(Error::NotPolytope("reduction bound needs a polytope"));
    }
    if action <= &ex::q(0) {
        return Err(Error::InvalidParameter("action must be positive".into()));
    }
    let n = k.dim();
    let s = LagrangianProduct::new(k.clone());
    let reduced = symplectic::reduce_product(&s, u)?;
    let vol = |b: &ConvexBody| -> Result<Q> {
        Ok(exact_polytope_volume(b)?.exact_rational().cloned().expect("rational volume"))
    };
    let vol_s = vol(&s.base)? * vol(&s.dual)?;
    let lhs = vol(&reduced.base)? * vol(&reduced.dual)?;
    let rhs = Q::from_integer((n as i64).into()) / action * &vol_s;
    Ok(ReductionBoundReport { n, holds: lhs >= rhs, equality: lhs == rhs, vol_s, lhs, rhs })
}

/// [`reduction_volume_bound`] on a Hanner polytope.
pub fn hanner_reduction_bound(tree: &HannerTree, u: &[Q], action: &Q) -> Result<ReductionBoundReport> {
    reduction_volume_bound(&ConvexBody::hanner(tree.clone()), u, action)
}

/// `π^k / k!`, the volume of the unit ball in `R^{2k}`.
pub fn even_ball_volume(k: usize) -> f64 {
    (k as f64 * std::f64::consts::PI.ln() - ln_gamma(k as f64 + 1.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{q, qf};
    use std::f64::consts::PI;

    #[test]
    fn closed_forms() {
        assert_eq!(lp_ball_volume(1.0, 2).unwrap().exact_rational(), Some(&q(2)));
        assert!((lp_ball_volume(2.0, 3).unwrap().value - 4.0 * PI / 3.0).abs() < 1e-13);
        assert_eq!(lp_ball_volume(f64::INFINITY, 3).unwrap().value, 8.0);
        assert!(lp_ball_volume(0.9, 3).is_err());
        assert!((even_ball_volume(2) - PI * PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn mahler_of_cube_is_the_bound() {
        let r = mahler_product(&ConvexBody::cube(3), &VolumeConfig::default()).unwrap();
        assert_eq!(r.product_exact.as_ref().unwrap().as_rational(), Some(&qf(32, 3)));
        assert_eq!(r.ratio_exact.unwrap().as_rational(), Some(&q(1)));
    }

    #[test]
    fn hexagon_section() {
        let s = ConvexBody::cube(3).hyperplane_section(&[q(1), q(1), q(1)]).unwrap();
        let v = slice_volume(&s, &VolumeConfig::default()).unwrap();
        assert_eq!(v.exact.as_ref().unwrap().to_string(), "3*sqrt(3)");
        let r = mahler_product(&s.body, &VolumeConfig::default()).unwrap();
        assert_eq!(r.product_exact.unwrap().as_rational(), Some(&q(9)));
        assert_eq!(r.ratio_exact.unwrap().as_rational(), Some(&qf(9, 8)));
    }

    #[test]
    fn projection_areas() {
        let u = [q(1), q(1), q(1)];
        let cfg = VolumeConfig::default();
        let cross = slice_volume(&ConvexBody::cross(3).hyperplane_projection(&u).unwrap(), &cfg).unwrap();
        assert_eq!(cross.exact.unwrap().to_string(), "sqrt(3)");
        let cube = slice_volume(&ConvexBody::cube(3).hyperplane_projection(&u).unwrap(), &cfg).unwrap();
        assert_eq!(cube.exact.unwrap().to_string(), "4*sqrt(3)");
    }

    #[test]
    fn functional_products_and_sums() {
        let cfg = VolumeConfig::default();
        let disc = ConvexBody::euclidean_ball(2);
        let cyl = volume(&ConvexBody::product(disc.clone(), ConvexBody::cube(1)), &cfg).unwrap();
        assert!((cyl.value - 2.0 * PI).abs() < 1e-12);
        // double cone over a disc: 2 · π · 1 / 3
        let cone = volume(&ConvexBody::l1_sum(disc, ConvexBody::cube(1)), &cfg).unwrap();
        assert!((cone.value - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reduction_bound_on_the_cube() {
        let r = reduction_volume_bound(&ConvexBody::cube(3), &[q(0), q(0), q(1)], &q(4)).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone()), (q(8), q(8)));
        assert!(r.holds && r.equality);
        let r = reduction_volume_bound(&ConvexBody::cube(3), &[q(1), q(1), q(1)], &q(4)).unwrap();
        assert_eq!(r.lhs, q(9));
        assert!(r.holds && !r.equality);
    }
}
