//! Counter-based random streams.
//!
//! Samples are grouped in fixed-size blocks and block `k` draws from the
//! ChaCha stream `k` of the seed, so any partition of the work over threads
//! produces the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const BLOCK: u64 = 4096;

pub fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block);
    rng
}

/// Runs `f(first_index, count, rng)` on consecutive blocks covering `total`
/// samples and returns the per-block results in block order.
pub fn par_blocks<T, F>(seed: u64, total: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64, &mut ChaCha8Rng) -> T + Sync,
{
    let blocks = total.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let count = BLOCK.min(total - start);
            f(start, count, &mut block_rng(seed, b))
        })
        .collect()
}

/// A seed for the `k`-th independent sub-experiment of `seed`.
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn blocks_do_not_depend_on_scheduling() {
        let draw = |_: u64, n: u64, rng: &mut ChaCha8Rng| (0..n).map(|_| rng.random::<u64>()).collect::<Vec<_>>();
        let par: Vec<u64> = par_blocks(5, 10_000, draw).concat();
        let seq: Vec<u64> = (0..3).flat_map(|b| draw(0, BLOCK.min(10_000 - b * BLOCK), &mut block_rng(5, b))).collect();
        assert_eq!(par, seq);
        assert_eq!(par.len(), 10_000);
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
