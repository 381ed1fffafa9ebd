use rand::Rng;

use super::{Method, VolumeResult, Z95};
use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::sampling::par_blocks;

/// Hit-or-miss volume in the box `Π [-h_K(e_i), h_K(e_i)]`.
pub fn mc_volume(k: &ConvexBody, samples: u64, seed: u64) -> Result<VolumeResult> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let half = k.bounding_box();
    if half.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(Error::Unbounded);
    }
    let box_vol: f64 = half.iter().map(|h| 2.0 * h).product();
    let d = k.dim();
    let hits: u64 = par_blocks(seed, samples, |_, count, rng| {
        let mut x = vec![0.0; d];
        let mut hits = 0u64;
        for _ in 0..count {
            for (xi, h) in x.iter_mut().zip(&half) {
                *xi = h * rng.random_range(-1.0..1.0);
            }
            if k.contains(&x) {
                hits += 1;
            }
        }
        hits
    })
    .into_iter()
    .sum();
    let n = samples as f64;
    let frac = hits as f64 / n;
    let se = box_vol * (frac * (1.0 - frac) / n).sqrt();
    Ok(VolumeResult {
        value: box_vol * frac,
        exact: None,
        method: Method::MonteCarlo,
        ci_halfwidth: Z95 * se,
        std_error: se,
        samples,
        seed: Some(seed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cube_is_exact() {
        let v = mc_volume(&ConvexBody::cube(3), 10_000, 1).unwrap();
        assert_eq!((v.value, v.ci_halfwidth), (8.0, 0.0));
    }

    #[test]
    fn disc_within_three_sigma() {
        let v = mc_volume(&ConvexBody::euclidean_ball(2), 200_000, 3).unwrap();
        assert!((v.value - PI).abs() <= 3.0 * v.std_error, "{v:?}");
        assert_eq!(v, mc_volume(&ConvexBody::euclidean_ball(2), 200_000, 3).unwrap());
        assert!(mc_volume(&ConvexBody::cube(2), 0, 3).is_err());
    }
}
