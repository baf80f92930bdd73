use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type EvalFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A box-bounded continuous minimization problem.
///
/// Lower fitness is better everywhere in this crate.
#[derive(Clone)]
pub struct ObjectiveSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
    eval: Arc<EvalFn>,
}

impl ObjectiveSpec {
    pub fn new<F>(lower: Vec<f64>, upper: Vec<f64>, evaluate: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if lower.is_empty() {
            return Err(Error::config("objective dimension must be at least 1"));
        }
        if lower.len() != upper.len() {
            return Err(Error::config(format!(
                "bound length mismatch: {} lower vs {} upper",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::config(format!(
                    "invalid bounds in dimension {i}: [{lo}, {hi}]"
                )));
            }
        }
        Ok(ObjectiveSpec {
            lower,
            upper,
            eval: Arc::new(evaluate),
        })
    }

    /// Same `[lower, upper]` box in every one of `dim` dimensions.
    pub fn uniform_bounds<F>(dim: usize, lower: f64, upper: f64, evaluate: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(vec![lower; dim], vec![upper; dim], evaluate)
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dimension());
        (self.eval)(x)
    }
}

impl fmt::Debug for ObjectiveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveSpec")
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish_non_exhaustive()
    }
}
