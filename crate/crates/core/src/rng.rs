//! Counter-based random streams.
//!
//! Every path owns a substream keyed by `(master_seed, path_index)`; the
//! k-th draw of a stream is a pure function of its key and `k`, so results
//! never depend on how paths are scheduled across workers.

use crate::normal;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the substream for `index` under `master_seed`.
#[inline]
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    mix64(
        mix64(master_seed ^ 0x6a09_e667_f3bc_c909)
            .wrapping_add(mix64(index.wrapping_add(GOLDEN_GAMMA))),
    )
}

/// SplitMix64 stream: draw k is `mix64(seed + (k+1)·γ)`.
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn for_path(master_seed: u64, path_index: u64) -> Self {
        Self::new(derive_seed(master_seed, path_index))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Jump to draw number `k` of the stream.
    pub fn set_position(&mut self, k: u64) {
        self.counter = k;
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(
            self.seed
                .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)),
        )
    }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal by inversion of one uniform.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        normal::quantile_fast(self.uniform())
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for z in out.iter_mut() {
            *z = self.normal();
        }
    }
}
