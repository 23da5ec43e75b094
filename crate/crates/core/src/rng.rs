//! Seeded random streams.
//!
//! Every random quantity is drawn from a ChaCha8 generator keyed by a
//! 64-bit master seed plus a 64-bit stream id:
//!
//! ```text
//! rng = ChaCha8Rng::seed_from_u64(master); rng.set_stream(stream_id)
//! ```
//!
//! Monte-Carlo code packs `(cell, replicate)` into the stream id as
//! `cell << 32 | replicate`, so each replicate owns an independent stream
//! and results do not depend on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(master: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream_id);
    rng
}

pub fn cell_stream(master: u64, cell: u32, replicate: u32) -> StreamRng {
    stream(master, (u64::from(cell) << 32) | u64::from(replicate))
}
