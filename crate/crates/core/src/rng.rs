//! Deterministic random number streams.
//!
//! Everything stochastic in this crate draws from ChaCha8 streams keyed by a
//! single 64-bit seed. A stream is addressed by `(seed, stream_id)`, so
//! independent pieces of work (graph rows, simulation noise, sweep points)
//! can run in parallel while the produced numbers stay independent of the
//! worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream id used for initial conditions of a simulation.
pub const STREAM_INIT: u64 = 0;
/// Stream id used for per-step additive noise of a simulation.
pub const STREAM_NOISE: u64 = 1;

/// Deterministic generator for the given `(seed, stream)` pair.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derive a child seed for an independent unit of work (a sweep point, an
/// ensemble member). SplitMix64 finalizer: cheap and well distributed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
