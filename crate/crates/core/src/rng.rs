//! Seeded random streams. Every stochastic routine takes an explicit seed;
//! batch `i` of a computation seeded with `s` draws from stream `s + i`.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type StreamRng = ChaCha8Rng;

/// Samples per Monte Carlo batch. Fixed so results do not depend on the
/// thread count.
pub const BATCH: usize = 1 << 16;

pub fn stream(seed: u64, batch: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(batch))
}

pub fn gaussian_vector(rng: &mut impl Rng, dim: usize) -> DVector<f64> {
    DVector::from_iterator(dim, (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Uniform point on the unit sphere `S^{dim-1} ⊂ R^dim`.
pub fn unit_vector(rng: &mut impl Rng, dim: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, dim);
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Splits `count` items into `(batch_index, batch_len)` chunks of [`BATCH`].
pub fn batches(count: usize) -> Vec<(u64, usize)> {
    let mut out = Vec::with_capacity(count / BATCH + 1);
    let mut left = count;
    let mut i = 0u64;
    while left > 0 {
        let len = left.min(BATCH);
        out.push((i, len));
        left -= len;
        i += 1;
    }
    out
}
