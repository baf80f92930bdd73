//! Per-run best-so-far bookkeeping and the stopping rule shared by both
//! optimizers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TerminationCriteria {
    max_iterations: u64,
    target_fitness: Option<f64>,
}

impl TerminationCriteria {
    pub fn new(max_iterations: u64, target_fitness: Option<f64>) -> Result<Self> {
        if max_iterations == 0 {
            return Err(Error::config("max_iterations must be at least 1"));
        }
        if let Some(t) = target_fitness {
            if t.is_nan() {
                return Err(Error::config("target_fitness must not be NaN"));
            }
        }
        Ok(TerminationCriteria {
            max_iterations,
            target_fitness,
        })
    }

    pub fn iterations(max_iterations: u64) -> Result<Self> {
        Self::new(max_iterations, None)
    }

    pub fn max_iterations(&self) -> u64 {
        self.max_iterations
    }

    pub fn target_fitness(&self) -> Option<f64> {
        self.target_fitness
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: u64,
    pub best_fitness: f64,
    /// Cumulative objective evaluations up to and including this iteration.
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub seed: u64,
    pub entries: Vec<TraceEntry>,
    /// Evaluations that returned NaN or an infinity. They never count as an
    /// improvement.
    pub non_finite_evaluations: u64,
}

impl RunTrace {
    pub fn new(seed: u64) -> Self {
        RunTrace {
            seed,
            entries: Vec::new(),
            non_finite_evaluations: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn last(&self) -> Option<&TraceEntry> {
        self.entries.last()
    }

    pub fn best_fitness(&self) -> Option<f64> {
        self.last().map(|e| e.best_fitness)
    }

    pub fn evaluations(&self) -> u64 {
        self.last().map_or(0, |e| e.evaluations)
    }

    /// Appends iteration `iteration`, flooring `best` at the previous entry.
    ///
    /// `evaluations` is the caller's cumulative count and may not decrease.
    pub fn record_iteration(&mut self, iteration: u64, best: f64, evaluations: u64) -> Result<()> {
        let expected = self.entries.len() as u64;
        if iteration != expected {
            return Err(Error::contract(format!(
                "trace expected iteration {expected}, got {iteration}"
            )));
        }
        let (best_fitness, evaluations) = match self.entries.last() {
            Some(prev) => {
                if evaluations < prev.evaluations {
                    return Err(Error::contract("evaluation count decreased"));
                }
                // NaN never replaces a recorded best.
                let floor = if best < prev.best_fitness {
                    best
                } else {
                    prev.best_fitness
                };
                (floor, evaluations)
            }
            None => (best, evaluations),
        };
        self.entries.push(TraceEntry {
            iteration,
            best_fitness,
            evaluations,
        });
        Ok(())
    }
}

/// True once `max_iterations` iterations are recorded or the latest best is
/// at or below the target.
pub fn should_terminate(trace: &RunTrace, criteria: &TerminationCriteria) -> bool {
    if trace.len() as u64 >= criteria.max_iterations {
        return true;
    }
    match (criteria.target_fitness, trace.best_fitness()) {
        (Some(target), Some(best)) => best <= target,
        _ => false,
    }
}
