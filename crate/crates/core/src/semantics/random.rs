use std::collections::HashMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::scalar::Scalar;

/// Seeded randomness with one independent substream per key (leaf index).
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    streams: HashMap<u64, ChaCha8Rng>,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource {
            seed,
            streams: HashMap::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&mut self, key: u64) -> &mut ChaCha8Rng {
        let seed = self.seed;
        self.streams
            .entry(key)
            .or_insert_with(|| substream(seed, key))
    }

    /// Next uniform draw in [0, 1) from the substream of `key`.
    pub fn uniform(&mut self, key: u64) -> f64 {
        self.stream(key).gen::<f64>()
    }
}

/// The generator behind substream `key` of master seed `seed`.
pub fn substream(seed: u64, key: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    rng
}

/// Index picked by the uniform draw `u` from `weights`: the first position
/// whose cumulative weight exceeds `u` times the total.
pub fn sample_index<F: Scalar>(weights: &[F], u: f64) -> usize {
    let total = weights.iter().fold(F::zero(), |acc, &w| acc + w);
    let target = F::of(u) * total;
    let mut acc = F::zero();
    for (i, &w) in weights.iter().enumerate() {
        acc = acc + w;
        if acc > target {
            return i;
        }
    }
    // Rounding can leave the last cumulative sum at or below the target.
    weights
        .iter()
        .rposition(|&w| w > F::zero())
        .unwrap_or(weights.len().saturating_sub(1))
}
