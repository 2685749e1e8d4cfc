//! Splittable deterministic randomness.
//!
//! A [`RandomSource`] is a 64-bit key. Child sources are derived by mixing
//! the parent key with a label, so every consumer (one RR set, one Estimate
//! run, one coin family) owns a stream that does not depend on how many
//! draws any other consumer made.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomSource {
    key: u64,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { key: splitmix64(seed) }
    }

    /// Child source for `label`. Distinct labels give independent streams.
    #[inline]
    pub fn split(self, label: u64) -> Self {
        RandomSource {
            key: splitmix64(self.key ^ splitmix64(label.wrapping_add(0x2545_F491_4F6C_DD1D))),
        }
    }

    /// Child source for a path of labels.
    pub fn split_path(self, labels: &[u64]) -> Self {
        labels.iter().fold(self, |s, &l| s.split(l))
    }

    pub fn rng(self) -> Rng {
        ChaCha8Rng::seed_from_u64(self.key)
    }

    pub fn key(self) -> u64 {
        self.key
    }
}
