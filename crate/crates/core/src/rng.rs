//! Random stream derivation.
//!
//! A run owns one master seed. Each consumer draws from its own ChaCha8
//! stream selected by a fixed label and, for per-tick phases, the zero-based
//! tick index. Streams never share state, so adding or removing draws in one
//! phase leaves every other phase untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamLabel {
    Population = 1,
    Graph = 2,
    Campaign = 3,
    Peer = 4,
    Media = 5,
    Government = 6,
}

/// The generator for `label` at `tick` under master `seed`.
pub fn stream(seed: u64, label: StreamLabel, tick: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((tick << 8) | label as u64);
    rng
}
