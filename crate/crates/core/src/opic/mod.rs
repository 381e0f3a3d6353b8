//! Orthogonal polynomial integral collocation: one coefficient set for the
//! highest derivative, every lower level recovered by exact integration.

mod ivp;
mod operator;
mod weights;

pub use ivp::{solve_linear_ivp, solve_nonlinear_ivp, TrajectoryLevels};
pub use operator::{build_operator, p_term, OpicOperator};
pub use weights::IntegrationWeights;
