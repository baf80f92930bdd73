//! Deterministic swarm-intelligence optimizers.
//!
//! * [`pso`]: particle swarm optimization for box-bounded continuous
//!   minimization, with global or ring (lbest) guides and velocity clamping.
//! * [`aco`]: ant colony optimization (Ant System) for the symmetric
//!   travelling salesman problem.
//! * [`problems`]: benchmark objectives, TSP instances and an exhaustive TSP
//!   oracle.
//! * [`experiment`]: the multi-seed harness behind the `swarmkit` binary.
//!
//! Every run is a pure function of its configuration and seed. Each particle
//! or ant draws from its own [`rng::RngStream`], so results are bit-identical
//! whatever the thread count.

pub mod aco;
pub mod error;
pub mod experiment;
pub mod objective;
pub mod problems;
pub mod pso;
pub mod rng;
pub mod trace;

pub use error::{Error, Result};
pub use objective::ObjectiveSpec;
pub use rng::{derive_stream, RngStream, UniformSource};
pub use trace::{should_terminate, RunTrace, TerminationCriteria, TraceEntry};

/// Runs `f` on a dedicated pool of `workers` threads, or inline for one.
pub(crate) fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("could not start {workers} worker threads: {e}")))?;
    Ok(pool.install(f))
}
