//! Deterministic random substreams.
//!
//! Every random draw is taken from a ChaCha20 stream keyed by the run seed
//! and selected by `(purpose, index)`, so results depend only on the seed and
//! the logical index of the trial, never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Indices must stay below this so the purpose tag fits in the top byte.
pub const MAX_INDEX: u64 = 1 << 56;

/// Longest session supported by [`session_slot`].
pub const MAX_SESSION_LEN: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    HashSeed = 1,
    Pad = 2,
    Channel = 3,
    Trial = 4,
    Sample = 5,
    Inject = 6,
    Message = 7,
    Cell = 8,
}

pub fn substream(seed: u64, purpose: Purpose, index: u64) -> ChaCha20Rng {
    assert!(index < MAX_INDEX, "substream index {index} out of range");
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 56) | index);
    rng
}

/// Index of message `i` within session `session`.
pub fn session_slot(session: u64, i: u64) -> u64 {
    assert!(i < MAX_SESSION_LEN, "session position {i} out of range");
    session * MAX_SESSION_LEN + i
}

/// Run seed for cell `index` of a sweep.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    use rand::RngCore;
    substream(seed, Purpose::Cell, index).next_u64()
}
