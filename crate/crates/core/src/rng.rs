//! Deterministic seed splitting and named random streams.
//!
//! Every consumer of randomness (a tree, a rollout worker, an episode's
//! environment) draws from its own [`Stream`], derived from a root seed and a
//! path of `(label, index)` pairs. Derivation is a pure function, so adding
//! workers never perturbs the draws seen by worker 0.
//!
//! Construction, fixed so that ports in other languages reproduce the draws:
//!
//! 1. `h = splitmix64(root_seed)`
//! 2. for each `(label, index)` in the path:
//!    `h = splitmix64(h ^ fnv1a64(label))`, then `h = splitmix64(h ^ index)`
//! 3. a SplitMix64 generator seeded with `h` emits four words; their
//!    little-endian bytes form the 32-byte ChaCha8 key (nonce 0, counter 0).
//! 4. `next_u64` is the ChaCha8 block output read as two little-endian u32
//!    words (low word first); `next_f64 = (next_u64 >> 11) * 2^-53`.
//!
//! `splitmix64(x)` is one step of the SplitMix64 finalizer applied to
//! `x + 0x9E3779B97F4A7C15`.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const FNV_OFFSET: u64 = 0xCBF2_9CE4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01B3;

/// One SplitMix64 step: advance by the golden gamma and mix.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a over the UTF-8 bytes of `label`.
pub fn fnv1a64(label: &str) -> u64 {
    label
        .as_bytes()
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// Identifies a stream: a root seed plus an ordered path of labelled indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub root_seed: u64,
    pub path: Vec<(String, u64)>,
}

impl StreamKey {
    pub fn new(root_seed: u64) -> Self {
        Self {
            root_seed,
            path: Vec::new(),
        }
    }

    /// Returns a new key extended by one `(label, index)` segment.
    pub fn child(&self, label: &str, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push((label.to_owned(), index));
        Self {
            root_seed: self.root_seed,
            path,
        }
    }

    /// The 64-bit digest the stream generator is seeded from.
    pub fn digest(&self) -> u64 {
        self.path
            .iter()
            .fold(splitmix64(self.root_seed), |h, (label, index)| {
                let h = splitmix64(h ^ fnv1a64(label));
                splitmix64(h ^ index)
            })
    }

    /// Folds the whole key into a fresh root seed, for handing to a nested
    /// component that derives its own streams.
    pub fn to_seed(&self) -> u64 {
        self.digest()
    }
}

/// A named random stream. Owned by exactly one execution context.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    inner: ChaCha8Rng,
}

impl Stream {
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw on `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw on `[lo, hi]`; consumes exactly one `u64`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Builds the stream identified by `key`. Pure: no global state.
pub fn derive_stream(key: &StreamKey) -> Stream {
    let mut sm = key.digest();
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(sm).to_le_bytes());
        sm = sm.wrapping_add(GOLDEN_GAMMA);
    }
    Stream {
        inner: ChaCha8Rng::from_seed(seed),
    }
}
