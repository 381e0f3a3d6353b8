//! Reference NLP solvers behind the [`NlpProblem`] interface.
//!
//! Derivatives are forward differences with per-variable steps scaled by
//! `max(1, |x_i|)`; Jacobian columns are evaluated concurrently. Results are
//! deterministic for a given problem, starting point and option set.

mod batch;
mod fd;
mod options;
mod problem;
mod qp;
mod sqp;

use std::io::Write;

pub use batch::{batch_run, batch_solve, failed_report, percentile, BatchResult, BatchStats};
pub use options::{Algorithm, SolveReport, SolveStatus, SolverOptions, TraceRecord};
pub use problem::{FnProblem, NlpProblem};

use crate::error::{Error, Result};

/// Solve `problem` from `x0`.
pub fn solve<P: NlpProblem + ?Sized>(problem: &P, x0: &[f64], options: &SolverOptions) -> Result<SolveReport> {
    solve_traced(problem, x0, options, None)
}

/// As [`solve`], streaming one JSON line per iteration into `trace`.
pub fn solve_traced<P: NlpProblem + ?Sized>(
    problem: &P,
    x0: &[f64],
    options: &SolverOptions,
    trace: Option<&mut dyn Write>,
) -> Result<SolveReport> {
    options.validate()?;
    let n = problem.num_variables();
    if x0.len() != n {
        return Err(Error::Layout { expected: n, actual: x0.len() });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteIterate { chi: x0.to_vec() });
    }
    match options.algorithm {
        Algorithm::Sqp => sqp::solve_sqp(problem, x0, options, trace),
        Algorithm::InteriorPoint => sqp::solve_barrier_sqp(problem, x0, options, trace),
    }
}
