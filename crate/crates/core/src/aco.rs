//! Ant colony optimization (Ant System) for the symmetric TSP.
//!
//! A run initializes every edge to `tau0`, then repeats: each ant builds a
//! closed tour with the random-proportional rule, tours are measured, all
//! edges evaporate by `(1 - rho)` (never below `tau_floor`), and every ant
//! deposits `q / length` on each edge of its tour.
//!
//! Ant `k` always starts at node `k mod n` and draws from its own stream, so
//! tours within an iteration can be built in any order or in parallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{agent_streams, UniformSource};
use crate::trace::{should_terminate, RunTrace, TerminationCriteria, TraceEntry};

/// Symmetric distance matrix with a zero diagonal and positive, finite
/// off-diagonal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceGraph {
    n: usize,
    dist: Vec<f64>,
}

impl DistanceGraph {
    pub const MIN_NODES: usize = 3;

    pub fn from_matrix(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n < Self::MIN_NODES {
            return Err(Error::config(format!("n < 3 (got {n} nodes)")));
        }
        let mut dist = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::config(format!(
                    "distance row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            dist.extend_from_slice(row);
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::config(format!("distance[{i}][{i}] must be 0")));
            }
            for j in (i + 1)..n {
                let (a, b) = (dist[i * n + j], dist[j * n + i]);
                if a != b {
                    return Err(Error::config(format!(
                        "distance[{i}][{j}] != distance[{j}][{i}]"
                    )));
                }
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::config(format!(
                        "distance[{i}][{j}] = {a} must be positive and finite"
                    )));
                }
            }
        }
        Ok(DistanceGraph { n, dist })
    }

    /// Euclidean distances between 2D points.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        let rows = points
            .iter()
            .map(|&(xi, yi)| {
                points
                    .iter()
                    .map(|&(xj, yj)| (xi - xj).hypot(yi - yj))
                    .collect()
            })
            .collect();
        Self::from_matrix(rows)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneMatrix {
    n: usize,
    tau: Vec<f64>,
}

impl PheromoneMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.n + j]
    }

    /// Sets edge `{i, j}` in both directions.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.tau[i * self.n + j] = value;
        self.tau[j * self.n + i] = value;
    }

    /// Off-diagonal levels, row-major.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |i| (0..n).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(move |(i, j)| (i, j, self.get(i, j)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcoConfig {
    /// Colony size; `None` uses one ant per node.
    pub num_ants: Option<usize>,
    /// Pheromone exponent.
    pub alpha: f64,
    /// Heuristic (inverse distance) exponent.
    pub beta: f64,
    /// Evaporation rate in `[0, 1]`.
    pub rho: f64,
    /// Deposit constant.
    pub q: f64,
    pub tau0: f64,
    pub tau_floor: f64,
    pub termination: TerminationCriteria,
    pub workers: usize,
}

impl Default for AcoConfig {
    fn default() -> Self {
        AcoConfig {
            num_ants: None,
            alpha: 1.0,
            beta: 2.0,
            rho: 0.5,
            q: 1.0,
            tau0: 1.0,
            tau_floor: 1e-12,
            termination: TerminationCriteria::iterations(100).expect("nonzero"),
            workers: 1,
        }
    }
}

impl AcoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_ants == Some(0) {
            return Err(Error::config("num_ants must be at least 1"));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be a finite value >= 0")));
            }
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::config("rho out of [0,1]"));
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::config("q must be a finite value > 0"));
        }
        if !(self.tau_floor > 0.0 && self.tau_floor.is_finite()) {
            return Err(Error::config("tau_floor must be a finite value > 0"));
        }
        if !(self.tau0 >= self.tau_floor && self.tau0.is_finite()) {
            return Err(Error::config("tau0 must be finite and >= tau_floor"));
        }
        if self.workers == 0 {
            return Err(Error::config("workers must be at least 1"));
        }
        Ok(())
    }

    pub fn ants_for(&self, graph: &DistanceGraph) -> usize {
        self.num_ants.unwrap_or(graph.len())
    }
}

/// A closed tour. `length` includes the edge from the last node back to the
/// first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

impl Tour {
    pub fn new(graph: &DistanceGraph, order: Vec<usize>) -> Result<Self> {
        let length = tour_length(graph, &order)?;
        Ok(Tour { order, length })
    }

    /// Each closed-tour edge once, including the return edge.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order.len();
        (0..n).map(move |k| (self.order[k], self.order[(k + 1) % n]))
    }
}

pub fn initialize_pheromones(graph: &DistanceGraph, config: &AcoConfig) -> Result<PheromoneMatrix> {
    config.validate()?;
    let n = graph.len();
    let mut tau = vec![config.tau0; n * n];
    for i in 0..n {
        tau[i * n + i] = 0.0;
    }
    Ok(PheromoneMatrix { n, tau })
}

/// Probability of moving from `current` to each unvisited node, as
/// `(node, p)` pairs in ascending node order.
///
/// `p(j)` is proportional to `tau[current][j]^alpha * (1 / d[current][j])^beta`.
/// Weights are formed in log space and shifted by their maximum so extreme
/// exponents cannot underflow every candidate to zero.
pub fn transition_probabilities(
    graph: &DistanceGraph,
    pheromones: &PheromoneMatrix,
    current: usize,
    visited: &[bool],
    config: &AcoConfig,
) -> Result<Vec<(usize, f64)>> {
    let n = graph.len();
    if visited.len() != n || pheromones.len() != n {
        return Err(Error::contract(
            "visited set or pheromone matrix does not match graph",
        ));
    }
    if current >= n {
        return Err(Error::contract(format!("node {current} out of range")));
    }
    let mut scored: Vec<(usize, f64)> = (0..n)
        .filter(|&j| j != current && !visited[j])
        .map(|j| {
            let log_tau = pheromones.get(current, j).ln();
            let log_eta = -graph.distance(current, j).ln();
            (
                j,
                weighted(config.alpha, log_tau) + weighted(config.beta, log_eta),
            )
        })
        .collect();
    if scored.is_empty() {
        return Err(Error::contract("no unvisited node left to move to"));
    }
    let max = scored
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (_, s) in scored.iter_mut() {
        *s = (*s - max).exp();
        total += *s;
    }
    for (_, s) in scored.iter_mut() {
        *s /= total;
    }
    Ok(scored)
}

// 0 * ln(x) is 0 even when ln(x) is infinite.
fn weighted(exponent: f64, log_value: f64) -> f64 {
    if exponent == 0.0 {
        0.0
    } else {
        exponent * log_value
    }
}

/// Builds one closed tour from `start`, one uniform draw per move, choosing
/// by inverse CDF over the candidates in ascending node order.
pub fn construct_tour(
    graph: &DistanceGraph,
    pheromones: &PheromoneMatrix,
    config: &AcoConfig,
    rng: &mut impl UniformSource,
    start: usize,
) -> Result<Tour> {
    let n = graph.len();
    if start >= n {
        return Err(Error::contract(format!("start node {start} out of range")));
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    visited[start] = true;
    order.push(start);
    let mut current = start;
    while order.len() < n {
        let probs = transition_probabilities(graph, pheromones, current, &visited, config)?;
        let u = rng.next_uniform();
        let mut next = probs.last().expect("non-empty").0;
        let mut acc = 0.0;
        for &(j, p) in &probs {
            acc += p;
            if u < acc {
                next = j;
                break;
            }
        }
        visited[next] = true;
        order.push(next);
        current = next;
    }
    Tour::new(graph, order)
}

/// Closed-tour length of `order`, which must visit every node exactly once.
pub fn tour_length(graph: &DistanceGraph, order: &[usize]) -> Result<f64> {
    let n = graph.len();
    if order.len() != n {
        return Err(Error::contract(format!(
            "tour has {} nodes, graph has {n}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v >= n || std::mem::replace(&mut seen[v], true) {
            return Err(Error::contract(format!(
                "node {v} missing, repeated or out of range"
            )));
        }
    }
    let mut total = 0.0;
    for k in 0..n {
        total += graph.distance(order[k], order[(k + 1) % n]);
    }
    Ok(total)
}

/// `tau <- max(tau_floor, (1 - rho) * tau)` on every edge.
pub fn evaporate(pheromones: &mut PheromoneMatrix, config: &AcoConfig) {
    let keep = 1.0 - config.rho;
    let n = pheromones.n;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let t = &mut pheromones.tau[i * n + j];
                *t = config.tau_floor.max(keep * *t);
            }
        }
    }
}

/// Every tour adds `q / length` to each of its edges, in both directions.
pub fn deposit(pheromones: &mut PheromoneMatrix, tours: &[Tour], config: &AcoConfig) -> Result<()> {
    for tour in tours {
        if tour.order.len() != pheromones.n {
            return Err(Error::contract("tour size does not match pheromone matrix"));
        }
        if !(tour.length > 0.0 && tour.length.is_finite()) {
            return Err(Error::contract(format!(
                "tour length {} must be positive",
                tour.length
            )));
        }
    }
    for tour in tours {
        let amount = config.q / tour.length;
        for (i, j) in tour.edges() {
            let v = pheromones.get(i, j) + amount;
            pheromones.set(i, j, v);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcoOutcome {
    pub best: Tour,
    pub trace: RunTrace,
    pub pheromones: PheromoneMatrix,
}

pub fn optimize_aco(graph: &DistanceGraph, config: &AcoConfig, seed: u64) -> Result<AcoOutcome> {
    optimize_aco_with(graph, config, seed, |_| Ok(()))
}

/// [`optimize_aco`] with a per-iteration trace observer.
pub fn optimize_aco_with<F>(
    graph: &DistanceGraph,
    config: &AcoConfig,
    seed: u64,
    mut observe: F,
) -> Result<AcoOutcome>
where
    F: FnMut(&TraceEntry) -> Result<()> + Send,
{
    config.validate()?;
    let ants = config.ants_for(graph);
    let n = graph.len();
    crate::with_workers(config.workers, || {
        let mut pheromones = initialize_pheromones(graph, config)?;
        let mut streams = agent_streams(seed, ants);
        let mut trace = RunTrace::new(seed);
        let mut best: Option<Tour> = None;
        let mut evaluations = 0u64;
        let mut iteration = 0u64;
        loop {
            let build =
                |(k, rng): (usize, &mut _)| construct_tour(graph, &pheromones, config, rng, k % n);
            let tours: Vec<Tour> = if config.workers > 1 {
                streams
                    .par_iter_mut()
                    .enumerate()
                    .map(build)
                    .collect::<Result<_>>()?
            } else {
                streams
                    .iter_mut()
                    .enumerate()
                    .map(build)
                    .collect::<Result<_>>()?
            };
            evaluations += tours.len() as u64;
            for tour in &tours {
                if best.as_ref().is_none_or(|b| tour.length < b.length) {
                    best = Some(tour.clone());
                }
            }
            evaporate(&mut pheromones, config);
            deposit(&mut pheromones, &tours, config)?;

            let best_len = best.as_ref().expect("at least one ant").length;
            trace.record_iteration(iteration, best_len, evaluations)?;
            observe(trace.last().expect("just recorded"))?;
            iteration += 1;
            if should_terminate(&trace, &config.termination) {
                break;
            }
        }
        Ok(AcoOutcome {
            best: best.expect("at least one iteration"),
            trace,
            pheromones,
        })
    })?
}
