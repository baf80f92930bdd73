//! Particle swarm optimization.
//!
//! Each outer iteration runs three phases in order:
//!
//! 1. evaluate every particle at its current position and keep strict
//!    improvements as its personal best (pbest);
//! 2. choose the particle whose pbest is lowest as the global best (gbest);
//! 3. move every particle: pick its guide (gbest, or the best pbest in its
//!    ring neighbourhood), update the velocity, clamp each component to
//!    `[-vmax, vmax]`, then add the velocity to the position.
//!
//! The velocity rule is the plain one with no inertia weight:
//!
//! ```text
//! v[i] <- v[i] + c1 * r1[i] * (pbest[i] - x[i]) + c2 * r2[i] * (guide[i] - x[i])
//! x[i] <- x[i] + v[i]
//! ```
//!
//! `r1[i]` and `r2[i]` are fresh uniform draws for every dimension, drawn in
//! ascending dimension order, `r1` before `r2`. Positions are never clamped to
//! the search box; only velocities are.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::ObjectiveSpec;
use crate::rng::{agent_streams, UniformSource};
use crate::trace::{should_terminate, RunTrace, TerminationCriteria, TraceEntry};

/// Which pbest a particle follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Topology {
    /// Everyone follows the swarm-wide best.
    Global,
    /// Particle `i` follows the best pbest among indices `i-k ..= i+k`
    /// (wrapping, self included).
    Ring(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    pub swarm_size: usize,
    /// Cognitive learning factor (pull toward the particle's own pbest).
    pub c1: f64,
    /// Social learning factor (pull toward the guide).
    pub c2: f64,
    /// Velocity cap applied to every dimension. `None` uses half the search
    /// range of each dimension.
    pub vmax: Option<f64>,
    pub topology: Topology,
    pub termination: TerminationCriteria,
    /// Threads used to evaluate and move particles within one run. Results do
    /// not depend on this value.
    pub workers: usize,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            swarm_size: 30,
            c1: 2.0,
            c2: 2.0,
            vmax: None,
            topology: Topology::Global,
            termination: TerminationCriteria::iterations(1000).expect("nonzero"),
            workers: 1,
        }
    }
}

/// Fraction of each dimension's range used as vmax when none is configured.
pub const DEFAULT_VMAX_FRACTION: f64 = 0.5;

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size == 0 {
            return Err(Error::config("swarm_size must be at least 1"));
        }
        for (name, c) in [("c1", self.c1), ("c2", self.c2)] {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::config(format!("{name} must be a finite value >= 0")));
            }
        }
        if let Some(v) = self.vmax {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config("vmax must be a finite value > 0"));
            }
        }
        if let Topology::Ring(k) = self.topology {
            if k == 0 || k >= self.swarm_size {
                return Err(Error::config(format!(
                    "ring radius {k} must satisfy 1 <= k < swarm_size ({})",
                    self.swarm_size
                )));
            }
        }
        if self.workers == 0 {
            return Err(Error::config("workers must be at least 1"));
        }
        Ok(())
    }

    /// Per-dimension velocity caps for `objective`.
    pub fn velocity_limits(&self, objective: &ObjectiveSpec) -> Vec<f64> {
        match self.vmax {
            Some(v) => vec![v; objective.dimension()],
            None => objective
                .lower()
                .iter()
                .zip(objective.upper())
                .map(|(lo, hi)| DEFAULT_VMAX_FRACTION * (hi - lo))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<f64>,
    pub pbest_fitness: f64,
}

impl Particle {
    pub fn dimension(&self) -> usize {
        self.position.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub particles: Vec<Particle>,
    pub gbest_position: Vec<f64>,
    pub gbest_fitness: f64,
    /// Completed outer iterations.
    pub iteration: u64,
    /// Cumulative objective calls, initialization included.
    pub evaluations: u64,
    pub non_finite_evaluations: u64,
}

impl SwarmState {
    fn refresh_gbest(&mut self) {
        let best = best_index(&self.particles, 0..self.particles.len());
        self.gbest_fitness = self.particles[best].pbest_fitness;
        self.gbest_position
            .clone_from(&self.particles[best].pbest_position);
    }
}

/// Lowest pbest among `indices`; ties go to the lowest index.
fn best_index(particles: &[Particle], indices: impl IntoIterator<Item = usize>) -> usize {
    let mut best: Option<usize> = None;
    for i in indices {
        best = match best {
            None => Some(i),
            Some(b) => {
                let (fi, fb) = (particles[i].pbest_fitness, particles[b].pbest_fitness);
                if fi < fb || (fi == fb && i < b) {
                    Some(i)
                } else {
                    Some(b)
                }
            }
        };
    }
    best.expect("non-empty neighbourhood")
}

fn sanitize(fitness: f64) -> (f64, bool) {
    if fitness.is_finite() {
        (fitness, false)
    } else {
        (f64::INFINITY, true)
    }
}

fn check_streams<R>(config: &PsoConfig, streams: &[R]) -> Result<()> {
    if streams.len() != config.swarm_size {
        return Err(Error::contract(format!(
            "expected {} particle streams, got {}",
            config.swarm_size,
            streams.len()
        )));
    }
    Ok(())
}

/// Random swarm inside the search box.
///
/// Particle `i` draws from `streams[i]`: first one uniform per position
/// component, then one per velocity component (uniform in `[-vmax, vmax]`).
/// Its pbest starts at that position with the evaluated fitness; a
/// non-finite fitness is stored as `+inf`.
pub fn initialize_swarm<R: UniformSource + Send>(
    objective: &ObjectiveSpec,
    config: &PsoConfig,
    streams: &mut [R],
) -> Result<SwarmState> {
    config.validate()?;
    check_streams(config, streams)?;
    let limits = config.velocity_limits(objective);
    let (lower, upper) = (objective.lower(), objective.upper());

    let init = |rng: &mut R| {
        let position: Vec<f64> = lower
            .iter()
            .zip(upper)
            .map(|(lo, hi)| lo + rng.next_uniform() * (hi - lo))
            .collect();
        let velocity: Vec<f64> = limits
            .iter()
            .map(|vmax| -vmax + rng.next_uniform() * 2.0 * vmax)
            .collect();
        let (pbest_fitness, bad) = sanitize(objective.evaluate(&position));
        let particle = Particle {
            pbest_position: position.clone(),
            position,
            velocity,
            pbest_fitness,
        };
        (particle, bad)
    };
    let created: Vec<(Particle, bool)> = if config.workers > 1 {
        streams.par_iter_mut().map(init).collect()
    } else {
        streams.iter_mut().map(init).collect()
    };

    let non_finite = created.iter().filter(|(_, bad)| *bad).count() as u64;
    let particles: Vec<Particle> = created.into_iter().map(|(p, _)| p).collect();
    let mut state = SwarmState {
        gbest_position: Vec::new(),
        gbest_fitness: f64::INFINITY,
        particles,
        iteration: 0,
        evaluations: config.swarm_size as u64,
        non_finite_evaluations: non_finite,
    };
    state.refresh_gbest();
    Ok(state)
}

/// Position of the attractor particle `index` follows.
pub fn select_guide(state: &SwarmState, index: usize, topology: Topology) -> Result<&[f64]> {
    let n = state.particles.len();
    if index >= n {
        return Err(Error::contract(format!(
            "particle index {index} out of range for swarm of {n}"
        )));
    }
    Ok(match topology {
        Topology::Global => &state.gbest_position,
        Topology::Ring(k) => {
            let best = best_index(&state.particles, ring_neighbourhood(index, k, n));
            &state.particles[best].pbest_position
        }
    })
}

fn ring_neighbourhood(index: usize, k: usize, n: usize) -> impl Iterator<Item = usize> {
    let (index, k, n) = (index as i64, k as i64, n as i64);
    (-k..=k).map(move |off| (index + off).rem_euclid(n) as usize)
}

pub fn clamp_velocity(velocity: &[f64], vmax: f64) -> Vec<f64> {
    velocity.iter().map(|&v| clamp_component(v, vmax)).collect()
}

// min(vmax, max(-vmax, v)); a NaN input lands on -vmax.
fn clamp_component(v: f64, vmax: f64) -> f64 {
    vmax.min((-vmax).max(v))
}

/// New velocity for `particle` toward its pbest and `guide`, clamped to
/// `limits` per dimension.
pub fn update_velocity(
    particle: &Particle,
    guide: &[f64],
    config: &PsoConfig,
    limits: &[f64],
    rng: &mut impl UniformSource,
) -> Result<Vec<f64>> {
    let d = particle.dimension();
    if guide.len() != d
        || limits.len() != d
        || particle.velocity.len() != d
        || particle.pbest_position.len() != d
    {
        return Err(Error::contract("dimension mismatch in velocity update"));
    }
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let r1 = rng.next_uniform();
        let r2 = rng.next_uniform();
        let x = particle.position[i];
        let v = particle.velocity[i]
            + config.c1 * r1 * (particle.pbest_position[i] - x)
            + config.c2 * r2 * (guide[i] - x);
        out.push(clamp_component(v, limits[i]));
    }
    Ok(out)
}

pub fn update_position(position: &[f64], velocity: &[f64]) -> Result<Vec<f64>> {
    if position.len() != velocity.len() {
        return Err(Error::contract("dimension mismatch in position update"));
    }
    Ok(position.iter().zip(velocity).map(|(x, v)| x + v).collect())
}

/// Adopts the current position as pbest iff `new_fitness` is strictly lower.
/// Non-finite fitness never counts. Returns whether pbest changed.
pub fn update_pbest(particle: &mut Particle, new_fitness: f64) -> bool {
    if new_fitness.is_finite() && new_fitness < particle.pbest_fitness {
        particle.pbest_fitness = new_fitness;
        particle.pbest_position.clone_from(&particle.position);
        true
    } else {
        false
    }
}

/// One outer iteration: evaluate, refresh gbest, move.
///
/// Performs exactly `swarm_size` objective evaluations. Guides are read from
/// the pbests as they stand after phase 1, so particle order has no effect.
pub fn step<R: UniformSource + Send>(
    state: &mut SwarmState,
    objective: &ObjectiveSpec,
    config: &PsoConfig,
    streams: &mut [R],
) -> Result<()> {
    check_streams(config, streams)?;
    if state.particles.len() != config.swarm_size {
        return Err(Error::contract("swarm size differs from config"));
    }
    if state
        .particles
        .iter()
        .any(|p| p.dimension() != objective.dimension())
    {
        return Err(Error::contract("particle dimension differs from objective"));
    }
    let parallel = config.workers > 1;

    // Phase 1
    let evaluate = |p: &mut Particle| {
        let f = objective.evaluate(&p.position);
        update_pbest(p, f);
        !f.is_finite()
    };
    let non_finite = if parallel {
        state
            .particles
            .par_iter_mut()
            .map(evaluate)
            .filter(|b| *b)
            .count()
    } else {
        state
            .particles
            .iter_mut()
            .map(evaluate)
            .filter(|b| *b)
            .count()
    };
    state.evaluations += config.swarm_size as u64;
    state.non_finite_evaluations += non_finite as u64;

    // Phase 2
    state.refresh_gbest();

    // Phase 3
    let guides: Vec<Vec<f64>> = (0..state.particles.len())
        .map(|i| select_guide(state, i, config.topology).map(<[f64]>::to_vec))
        .collect::<Result<_>>()?;
    let limits = config.velocity_limits(objective);
    let mv = |((p, rng), guide): ((&mut Particle, &mut R), &Vec<f64>)| -> Result<()> {
        let v = update_velocity(p, guide, config, &limits, rng)?;
        p.position = update_position(&p.position, &v)?;
        p.velocity = v;
        Ok(())
    };
    if parallel {
        state
            .particles
            .par_iter_mut()
            .zip(streams.par_iter_mut())
            .zip(guides.par_iter())
            .map(mv)
            .collect::<Result<()>>()?;
    } else {
        state
            .particles
            .iter_mut()
            .zip(streams.iter_mut())
            .zip(guides.iter())
            .try_for_each(mv)?;
    }

    state.iteration += 1;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoOutcome {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    pub trace: RunTrace,
}

/// Runs a full optimization from `seed`.
pub fn optimize(objective: &ObjectiveSpec, config: &PsoConfig, seed: u64) -> Result<PsoOutcome> {
    optimize_with(objective, config, seed, |_| Ok(()))
}

/// Like [`optimize`], calling `observe` with each trace entry as it is
/// recorded. An observer error aborts the run.
pub fn optimize_with<F>(
    objective: &ObjectiveSpec,
    config: &PsoConfig,
    seed: u64,
    mut observe: F,
) -> Result<PsoOutcome>
where
    F: FnMut(&TraceEntry) -> Result<()> + Send,
{
    config.validate()?;
    crate::with_workers(config.workers, || {
        let mut streams = agent_streams(seed, config.swarm_size);
        let mut state = initialize_swarm(objective, config, &mut streams)?;
        let mut trace = RunTrace::new(seed);
        loop {
            step(&mut state, objective, config, &mut streams)?;
            trace.record_iteration(state.iteration - 1, state.gbest_fitness, state.evaluations)?;
            observe(trace.last().expect("just recorded"))?;
            if should_terminate(&trace, &config.termination) {
                break;
            }
        }
        trace.non_finite_evaluations = state.non_finite_evaluations;
        Ok(PsoOutcome {
            best_position: state.gbest_position,
            best_fitness: state.gbest_fitness,
            trace,
        })
    })?
}
