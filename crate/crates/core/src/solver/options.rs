use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Sequential quadratic programming with an l1 merit line search.
    Sqp,
    /// SQP on a decreasing log-barrier sequence over the variable bounds.
    InteriorPoint,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "sqp" => Ok(Algorithm::Sqp),
            "interior_point" | "ip" => Ok(Algorithm::InteriorPoint),
            other => Err(Error::Configuration(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub algorithm: Algorithm,
    pub max_iterations: usize,
    pub constraint_tolerance: f64,
    pub optimality_tolerance: f64,
    /// Relative forward-difference step.
    pub finite_difference_step: f64,
    /// Seed for random initial guesses in batch runs.
    pub rng_seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Sqp,
            max_iterations: 500,
            constraint_tolerance: 1e-8,
            optimality_tolerance: 1e-6,
            finite_difference_step: 1e-7,
            rng_seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn interior_point() -> Self {
        Self { algorithm: Algorithm::InteriorPoint, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.constraint_tolerance > 0.0 && self.optimality_tolerance > 0.0) {
            return Err(Error::Configuration("tolerances must be positive".into()));
        }
        if !(1e-9..=1e-4).contains(&self.finite_difference_step) {
            return Err(Error::Configuration(format!(
                "finite-difference step {} outside [1e-9, 1e-4]",
                self.finite_difference_step
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::Configuration("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    /// Feasible and stationary.
    Converged,
    /// Feasible, step below the stagnation threshold.
    Stagnated,
    IterationLimit,
    LineSearchFailure,
    SubproblemFailure,
    /// The problem returned non-finite values at an accepted point.
    EvaluationFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub status: SolveStatus,
    pub iterations: usize,
    pub objective: f64,
    pub chi: Vec<f64>,
    pub max_eq_violation: f64,
    pub max_ineq_violation: f64,
    /// Seconds; the only non-deterministic field.
    pub wall_time: f64,
}

/// One line of the optional iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    pub feasibility: f64,
    pub stationarity: f64,
    pub step: f64,
    pub alpha: f64,
    pub merit: f64,
    /// Barrier parameter (interior point only).
    pub mu: Option<f64>,
}
