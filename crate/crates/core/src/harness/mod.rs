//! Data ingestion, cross-validation, the S / SP / M benchmark, verification
//! drivers for the geometry results, and the on-disk document formats.

pub mod bench;
pub mod cv;
pub mod data;
pub mod docs;
pub mod verify;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream id for cost-set sampling.
pub const COST_STREAM: u64 = 1;
/// Stream ids `REPEAT_STREAM_BASE + r` drive the fold shuffle of repeat `r`.
pub const REPEAT_STREAM_BASE: u64 = 1 << 32;
/// Stream ids `TRIAL_STREAM_BASE + t` drive verification trial `t`.
pub const TRIAL_STREAM_BASE: u64 = 1 << 48;

/// Independent generator for `stream` under `master_seed`.
pub fn stream_rng(master_seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}
