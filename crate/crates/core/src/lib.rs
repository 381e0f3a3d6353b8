//! Trajectory optimization by direct orthogonal polynomial integral
//! collocation.
//!
//! The highest derivative of every coordinate is expanded in Chebyshev or
//! Legendre polynomials; all lower derivatives come from exact integration of
//! that one coefficient set. An optimal control problem is transcribed into a
//! nonlinear program over the modal coefficients and nodal controls, which
//! the bundled SQP / interior-point solver then handles.

pub mod error;
pub mod opic;
pub mod poly;
pub mod problems;
pub mod solver;
pub mod transcription;

pub use error::{Error, Result};
pub use opic::{build_operator, OpicOperator, TrajectoryLevels};
pub use poly::{make_grid, BasisSpec, Grid, NodeFamily, PolyFamily};
pub use problems::{Benchmark, ProblemName, ProblemSettings};
pub use solver::{solve, NlpProblem, SolveReport, SolverOptions};
pub use transcription::{OcpDefinition, TimeMap, Transcription};
