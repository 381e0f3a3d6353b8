//! Breakwell problem: double integrator with a state path constraint.

use serde::{Deserialize, Serialize};

use super::analytic::{analytic_breakwell, BreakwellRegime, BreakwellSolution};
use crate::error::{Error, Result};
use crate::transcription::{ControlSpec, CoordinateSpec, Inequality, OcpDefinition, TimeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakwellProblem {
    pub l: f64,
}

impl Default for BreakwellProblem {
    fn default() -> Self {
        Self { l: 1.0 / 7.0 }
    }
}

impl BreakwellProblem {
    pub fn new(l: f64) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::Configuration(format!("Breakwell bound l = {l} must be positive")));
        }
        Ok(Self { l })
    }

    pub fn regime(&self) -> BreakwellRegime {
        self.analytic().map(|s| s.regime).unwrap_or(BreakwellRegime::Bifurcated)
    }

    pub fn analytic(&self) -> Result<BreakwellSolution> {
        analytic_breakwell(self.l)
    }

    /// `x(0) = x(1) = 0`, `x'(0) = 1`, `x'(1) = -1`, `x <= l` at the nodes.
    pub fn build(&self) -> Result<OcpDefinition> {
        Self::new(self.l)?;
        Ok(OcpDefinition::new(
            "breakwell",
            vec![CoordinateSpec::new("x", 2, &[0.0, 1.0])],
            vec![ControlSpec::new("u")],
            TimeSpec::fixed(0.0, 1.0),
            |p, out| out[0] = p.control(0),
        )
        .with_lagrange(|p| 0.5 * p.control(0) * p.control(0))
        .initial_row("x(-1)", |e| e.comp_initial(0, 0))
        .initial_row("x'(-1) - 1/2", |e| e.comp_initial(0, 1) - 0.5)
        .final_row("x(1)", |e| e.comp_terminal(0, 0))
        .final_row("x'(1) + 1/2", |e| e.comp_terminal(0, 1) + 0.5)
        .inequality(Inequality::StateUpper { coord: 0, derivative: 0, value: self.l })
        .constant("l", self.l))
    }
}
