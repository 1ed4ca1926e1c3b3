//! Counter-based seeding: every random draw is tied to a key path such as
//! `(seed, label, replicate, k, i)`, so results never depend on evaluation
//! order or thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Key path for one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        Self(splitmix64(seed))
    }

    pub fn label(self, label: &str) -> Self {
        self.index(fnv1a(label.as_bytes()))
    }

    pub fn index(self, i: u64) -> Self {
        Self(splitmix64(self.0 ^ splitmix64(i.wrapping_add(0x632b_e59b_d9b4_e019))))
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut seed = [0u8; 32];
        let mut h = self.0;
        for chunk in seed.chunks_mut(8) {
            h = splitmix64(h);
            chunk.copy_from_slice(&h.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

/// Stream domains keep sampling and bootstrap draws apart.
pub(crate) const DOMAIN_SAMPLE: u64 = 1;
pub(crate) const DOMAIN_BOOTSTRAP: u64 = 2;
