//! Counter-based randomness.
//!
//! Every random value is addressed by a `(seed, stream, index)` triple and is
//! independent of evaluation order: fan a loop out over threads, draw the same
//! indices, get the same values. Streams are ChaCha8 streams, the index is the
//! block counter.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LANE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Address of a random stream: a run seed plus a stream id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleKey {
    pub seed: u64,
    pub stream: u64,
}

impl SampleKey {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Derive an independent sub-stream. Used wherever one operation needs
    /// several mutually independent sample sequences (e.g. the two coordinates
    /// of a product draw).
    pub fn substream(self, lane: u64) -> Self {
        Self {
            seed: self.seed,
            stream: split_mix(self.stream ^ (lane.wrapping_add(1)).wrapping_mul(LANE_SALT)),
        }
    }

    /// The `index`-th 64-bit value of this stream.
    pub fn value_at(self, index: u64) -> u64 {
        let mut rng = self.rng();
        rng.set_word_pos(u128::from(index) * 2);
        rng.next_u64()
    }

    /// The `index`-th uniform draw in `[0, 1)`.
    pub fn unit_at(self, index: u64) -> f64 {
        to_unit(self.value_at(index))
    }

    /// `count` consecutive uniform draws starting at `start`. Identical to
    /// calling [`SampleKey::unit_at`] per index, in one keyed pass.
    pub fn unit_block(self, start: u64, count: u64) -> Vec<f64> {
        let mut rng = self.rng();
        rng.set_word_pos(u128::from(start) * 2);
        (0..count).map(|_| to_unit(rng.next_u64())).collect()
    }

    fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn to_unit(bits: u64) -> f64 {
    // 53 high bits -> [0, 1)
    (bits >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

fn split_mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
