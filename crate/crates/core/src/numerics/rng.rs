//! Path-keyed random streams.
//!
//! Every random draw in the crate comes from an [`RngStream`]: a master seed
//! plus a path of indices (scenario, replication, stage, nest, chain, ...).
//! The path is folded through SplitMix64 into a 256-bit ChaCha8 key, so a
//! stream's draws depend only on `(master_seed, path)` and never on the
//! order in which streams are created or the thread that consumes them.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RngStream {
    master_seed: u64,
    path: Vec<u64>,
}

impl RngStream {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master_seed,
            path: Vec::new(),
        }
    }

    pub fn with_path(master_seed: u64, path: &[u64]) -> Self {
        Self {
            master_seed,
            path: path.to_vec(),
        }
    }

    /// Substream one level below this one.
    pub fn child(&self, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push(index);
        Self {
            master_seed: self.master_seed,
            path,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut state = splitmix64(self.master_seed ^ 0x6A09_E667_F3BC_C908);
        // length first, so that [] and [0] differ
        state = splitmix64(state ^ splitmix64(self.path.len() as u64));
        for &p in &self.path {
            state = splitmix64(state ^ splitmix64(p.wrapping_add(0x9E37_79B9_7F4A_7C15)));
        }
        let mut key = [0u8; 32];
        let mut s = state;
        for chunk in key.chunks_exact_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        StreamRng(ChaCha8Rng::from_seed(key))
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator handed out by [`RngStream::rng`].
#[derive(Debug, Clone)]
pub struct StreamRng(ChaCha8Rng);

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Source of the random quantities used by the imputation draws.
///
/// Implemented by [`StreamRng`]; tests substitute deterministic sources to
/// pin the posterior draw to its maximum-likelihood limit.
pub trait Draws {
    fn std_normal(&mut self) -> f64;
    /// Chi-square draw with `df > 0` degrees of freedom.
    fn chi_square(&mut self, df: f64) -> f64;
    /// Uniform on [0, 1).
    fn uniform(&mut self) -> f64;
    /// Uniform index in `0..n`, `n > 0`.
    fn index(&mut self, n: usize) -> usize;
}

impl Draws for StreamRng {
    fn std_normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }

    fn chi_square(&mut self, df: f64) -> f64 {
        ChiSquared::new(df)
            .expect("chi-square degrees of freedom must be positive")
            .sample(self)
    }

    fn uniform(&mut self) -> f64 {
        self.random::<f64>()
    }

    fn index(&mut self, n: usize) -> usize {
        self.random_range(0..n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first_draws(s: &RngStream) -> Vec<u64> {
        let mut r = s.rng();
        (0..8).map(|_| r.next_u64()).collect()
    }

    #[test]
    fn same_path_same_draws() {
        let a = RngStream::new(7).child(3).child(1);
        let b = RngStream::with_path(7, &[3, 1]);
        assert_eq!(first_draws(&a), first_draws(&b));
    }

    #[test]
    fn distinct_paths_differ() {
        let root = RngStream::new(7);
        let variants = [
            root.clone(),
            root.child(0),
            root.child(1),
            root.child(0).child(0),
            root.child(0).child(1),
            RngStream::new(8),
        ];
        for i in 0..variants.len() {
            for j in (i + 1)..variants.len() {
                assert_ne!(first_draws(&variants[i]), first_draws(&variants[j]));
            }
        }
    }
}
