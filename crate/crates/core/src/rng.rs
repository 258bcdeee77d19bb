//! Counter-based random substreams.
//!
//! Every independent unit of work (one trial, one channel sample) draws from
//! its own ChaCha stream selected by a 64-bit stream id, so results do not
//! depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Bits of the stream id reserved for the trial counter.
pub const TRIAL_BITS: u32 = 40;

/// The generator for stream `stream` under `master_seed`.
pub fn substream(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// Stream id of trial `trial` at grid point `point`.
pub fn trial_stream(point: usize, trial: u64) -> u64 {
    debug_assert!(trial < 1 << TRIAL_BITS);
    ((point as u64) << TRIAL_BITS) | trial
}
