//! Seeded secret streams.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::Bits;

/// `len` pseudo-random bits from ChaCha8 seeded with `seed`.
///
/// Bits are taken from successive `u64` outputs, most significant first,
/// so `random_bits(s, a)` is always a prefix of `random_bits(s, a + b)`.
pub fn random_bits(seed: u64, len: usize) -> Bits {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Bits::with_capacity(len);
    while out.len() < len {
        let word = rng.next_u64();
        let take = (len - out.len()).min(64);
        for k in 0..take {
            out.push((word >> (63 - k)) & 1 == 1);
        }
    }
    out
}
