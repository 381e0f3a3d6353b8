//! Double-integrator minimum-fuel transfer to the origin.

use serde::{Deserialize, Serialize};

use super::analytic::{analytic_min_fuel, min_fuel_minimum_time, MinFuelSolution};
use crate::error::{Error, Result};
use crate::transcription::{ControlSpec, CoordinateSpec, Inequality, OcpDefinition, TimeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinFuelProblem {
    pub x0: f64,
    pub xdot0: f64,
    /// Horizon as a multiple of the minimum transfer time.
    pub horizon_factor: f64,
    /// Write `u = u+ - u-` with `u+-` in `[0, 1]` so the cost is smooth.
    pub split_control: bool,
}

impl Default for MinFuelProblem {
    fn default() -> Self {
        Self { x0: 0.0, xdot0: 10.0, horizon_factor: 1.5, split_control: true }
    }
}

impl MinFuelProblem {
    pub fn tf_min(&self) -> f64 {
        min_fuel_minimum_time(self.x0, self.xdot0)
    }

    pub fn tf(&self) -> f64 {
        self.horizon_factor * self.tf_min()
    }

    pub fn validate(&self) -> Result<()> {
        if self.xdot0 < 0.0 || self.x0 < -0.5 * self.xdot0 * self.xdot0 {
            return Err(Error::Configuration(format!(
                "min-fuel initial state ({}, {}) needs xdot0 >= 0 and x0 >= -xdot0^2/2",
                self.x0, self.xdot0
            )));
        }
        if !(self.horizon_factor >= 1.0) {
            return Err(Error::Configuration("min-fuel horizon must be at least the minimum time".into()));
        }
        Ok(())
    }

    pub fn analytic(&self) -> Result<MinFuelSolution> {
        analytic_min_fuel(self.x0, self.xdot0, self.tf())
    }

    pub fn build(&self) -> Result<OcpDefinition> {
        self.validate()?;
        let (x0, v0, tf) = (self.x0, self.xdot0, self.tf());
        let controls = if self.split_control {
            vec![ControlSpec::new("u_plus"), ControlSpec::new("u_minus")]
        } else {
            vec![ControlSpec::new("u")]
        };
        let split = self.split_control;
        let mut ocp = OcpDefinition::new(
            "min-fuel",
            vec![CoordinateSpec::new("x", 2, &[x0, v0])],
            controls,
            TimeSpec::fixed(0.0, tf),
            move |p, out| out[0] = if split { p.control(0) - p.control(1) } else { p.control(0) },
        )
        .initial_row("x(-1) - x0", move |e| e.comp_initial(0, 0) - x0)
        .initial_row("x'(-1) - (tf/2) xdot0", move |e| e.comp_initial(0, 1) - e.time().half_span() * v0)
        .final_row("x(1)", |e| e.comp_terminal(0, 0))
        .final_row("x'(1)", |e| e.comp_terminal(0, 1))
        .constant("x0", x0)
        .constant("xdot0", v0)
        .constant("tf", tf)
        .constant("tf_min", self.tf_min());
        if split {
            ocp = ocp
                .with_lagrange(|p| p.control(0) + p.control(1))
                .inequality(Inequality::ControlUpper { channel: 0, value: 1.0 })
                .inequality(Inequality::ControlLower { channel: 0, value: 0.0 })
                .inequality(Inequality::ControlUpper { channel: 1, value: 1.0 })
                .inequality(Inequality::ControlLower { channel: 1, value: 0.0 });
        } else {
            ocp = ocp
                .with_lagrange(|p| p.control(0).abs())
                .inequality(Inequality::ControlUpper { channel: 0, value: 1.0 })
                .inequality(Inequality::ControlLower { channel: 0, value: -1.0 });
        }
        Ok(ocp)
    }
}
