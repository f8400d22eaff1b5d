//! Deterministic random streams.
//!
//! Every run has one master seed. Independent streams are obtained by
//! seeding ChaCha8 with the master seed and selecting the ChaCha stream
//! number `tag << 32 | index`, so a module tag and a per-trial index never
//! collide and results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const TAG_ALGEBRA: u64 = 1;
pub const TAG_CUMULANT: u64 = 2;
pub const TAG_FREENESS: u64 = 3;
pub const TAG_FOCK: u64 = 4;
pub const TAG_LIBERATION: u64 = 5;
pub const TAG_BAND: u64 = 6;
pub const TAG_HAAR: u64 = 7;

/// Stream `index` of module `tag` under `master`.
pub fn stream(master: u64, tag: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream((tag << 32) | (index & 0xffff_ffff));
    rng
}
