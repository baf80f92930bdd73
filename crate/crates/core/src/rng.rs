//! Seeded, splittable uniform streams.
//!
//! Every agent (particle or ant) owns one [`RngStream`] derived from the run
//! seed and its own stream id. Streams never share state, so the order in
//! which agents are processed cannot change any draw.
//!
//! The generator is ChaCha8 as implemented by `rand_chacha` 0.3: the key is
//! expanded from the 64-bit seed with `SeedableRng::seed_from_u64` and the
//! stream id selects the ChaCha stream (nonce) via `set_stream`. A uniform
//! real takes the top 53 bits of one `next_u64` and scales by 2^-53, so it is
//! always in `[0, 1)`. This whole recipe is part of the reproducibility
//! contract and is reported as [`RNG_ALGORITHM`].

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Identifier recorded in run metadata.
pub const RNG_ALGORITHM: &str =
    "chacha8 (rand_chacha 0.3; seed_from_u64(seed), set_stream(stream_id); u64>>11 * 2^-53)";

/// Anything that yields uniform reals in `[0, 1)`.
///
/// The optimizers draw through this trait so tests can substitute scripted
/// draws for the real generator.
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }
}

impl PartialEq for RngStream {
    fn eq(&self, other: &Self) -> bool {
        self.seed == other.seed && self.stream_id == other.stream_id && self.inner == other.inner
    }
}

impl UniformSource for RngStream {
    fn next_uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Pure function of `(seed, stream_id)`.
pub fn derive_stream(seed: u64, stream_id: u64) -> RngStream {
    let mut inner = ChaCha8Rng::seed_from_u64(seed);
    inner.set_stream(stream_id);
    RngStream {
        seed,
        stream_id,
        inner,
    }
}

/// Streams `0..count` for one seed, one per agent.
pub fn agent_streams(seed: u64, count: usize) -> Vec<RngStream> {
    (0..count as u64)
        .map(|id| derive_stream(seed, id))
        .collect()
}

/// Replays a fixed list of draws, cycling when exhausted.
#[derive(Debug, Clone)]
pub struct ScriptedDraws {
    draws: Vec<f64>,
    next: usize,
}

impl ScriptedDraws {
    pub fn new(draws: impl Into<Vec<f64>>) -> Self {
        let draws = draws.into();
        assert!(!draws.is_empty(), "scripted draws must not be empty");
        ScriptedDraws { draws, next: 0 }
    }

    pub fn consumed(&self) -> usize {
        self.next
    }
}

impl UniformSource for ScriptedDraws {
    fn next_uniform(&mut self) -> f64 {
        let r = self.draws[self.next % self.draws.len()];
        self.next += 1;
        r
    }
}
