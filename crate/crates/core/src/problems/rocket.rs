//! Planar rocket landing flip maneuver, nondimensionalized by
//! `L = h0`, `M = m0`, `beta = sqrt(h0 / g0)`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transcription::{ControlSpec, CoordinateSpec, Inequality, NodePoint, OcpDefinition, TimeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocketLandingProblem {
    pub rho0: f64,
    pub g0: f64,
    pub m_dry: f64,
    pub l_h: f64,
    pub l_r: f64,
    pub l_cm: f64,
    pub l_cp: f64,
    pub c_ld: f64,
    pub isp: f64,
    /// Maximum thrust in newtons.
    pub t_max: f64,
    /// Aerodynamic reference area in square meters.
    pub a_ref: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    /// Gimbal limit (rad) and gimbal rate limit (rad/s).
    pub phi_max: f64,
    pub phi_rate_max: f64,
    pub h0: f64,
    pub hdot0: f64,
    pub x0: f64,
    pub xdot0: f64,
    pub theta0: f64,
    pub thetadot0: f64,
    pub m0: f64,
    /// Final-time guess in seconds.
    pub tf_guess: f64,
}

impl Default for RocketLandingProblem {
    fn default() -> Self {
        let g0 = 9.81;
        let (l_h, l_r) = (50.0, 4.5);
        Self {
            rho0: 1.225,
            g0,
            m_dry: 85_000.0,
            l_h,
            l_r,
            l_cm: 20.0,
            l_cp: 22.5,
            c_ld: 0.4,
            isp: 350.0,
            // 280 tonne-force
            t_max: 280.0 * 1000.0 * g0,
            // side-projected area of the cylinder
            a_ref: 2.0 * l_r * l_h,
            delta_min: 0.4,
            delta_max: 1.0,
            phi_max: 15f64.to_radians(),
            phi_rate_max: 15f64.to_radians(),
            h0: 1000.0,
            hdot0: -90.0,
            x0: 100.0,
            xdot0: 0.0,
            theta0: FRAC_PI_2,
            thetadot0: 0.0,
            m0: 100_000.0,
            tf_guess: 10.0,
        }
    }
}

/// Scales and the six dimensionless groups of the scaled dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocketConstants {
    pub length: f64,
    pub mass: f64,
    pub beta: f64,
    pub c: [f64; 6],
}

impl RocketLandingProblem {
    fn inertia_arm(&self) -> f64 {
        self.l_r * self.l_r / 4.0 + self.l_h * self.l_h / 12.0
    }

    pub fn constants(&self) -> RocketConstants {
        let (l, m) = (self.h0, self.m0);
        let beta = (self.h0 / self.g0).sqrt();
        let k = self.inertia_arm();
        let aero = self.rho0 * self.a_ref * self.c_ld;
        RocketConstants {
            length: l,
            mass: m,
            beta,
            c: [
                beta * beta * self.t_max / (l * m),
                aero * l / (2.0 * m),
                beta * beta * self.g0 / l,
                beta * beta * self.l_cm * self.t_max / (m * k),
                (self.l_cp - self.l_cm) * aero * l * l / (2.0 * m * k),
                beta * self.t_max / (m * self.isp * self.g0),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.constants();
        if c.c.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Configuration(format!("rocket constants must be positive, got {:?}", c.c)));
        }
        if !(self.m_dry < self.m0) || !(self.delta_min < self.delta_max) {
            return Err(Error::Configuration("rocket mass or throttle limits are inconsistent".into()));
        }
        Ok(())
    }

    /// Coordinates `h, x, theta` (second order) and `m` (first order);
    /// controls `phi` (gimbal) then `delta` (throttle); free final time.
    pub fn build(&self) -> Result<OcpDefinition> {
        self.validate()?;
        let rc = self.constants();
        let [c1, c2, c3, c4, c5, c6] = rc.c;
        let (l, beta) = (rc.length, rc.beta);
        let vel = beta / l;
        let h0 = self.h0 / l;
        let hd0 = self.hdot0 * vel;
        let x0 = self.x0 / l;
        let xd0 = self.xdot0 * vel;
        let th0 = self.theta0;
        let thd0 = self.thetadot0 * beta;
        let dynamics = move |p: &NodePoint<'_>, out: &mut [f64]| {
            let (hd, xd) = (p.state(0, 1), p.state(1, 1));
            let theta = p.state(2, 0);
            let m = p.state(3, 0);
            let (phi, delta) = (p.control(0), p.control(1));
            let speed = (hd * hd + xd * xd).sqrt();
            out[0] = c1 * delta * (theta + phi).cos() / m - c2 * speed * hd / m - c3;
            out[1] = -c1 * delta * (theta + phi).sin() / m - c2 * speed * xd / m;
            out[2] = -c4 * delta * phi.sin() / m + c5 * speed * (xd * theta.cos() + hd * theta.sin()) / m;
            out[3] = -c6 * delta;
        };
        Ok(OcpDefinition::new(
            "rocket-landing",
            vec![
                CoordinateSpec::new("h", 2, &[h0, hd0]),
                CoordinateSpec::new("x", 2, &[x0, xd0]),
                CoordinateSpec::new("theta", 2, &[th0, thd0]),
                CoordinateSpec::new("m", 1, &[1.0]),
            ],
            vec![ControlSpec::new("phi"), ControlSpec::new("delta")],
            TimeSpec::free_final(0.0, self.tf_guess / beta),
            dynamics,
        )
        .with_mayer(|e| -e.terminal(3, 0))
        .initial_row("h(-1) - h0", move |e| e.comp_initial(0, 0) - h0)
        .initial_row("h'(-1) - (tf/2) hdot0", move |e| e.comp_initial(0, 1) - e.time().half_span() * hd0)
        .initial_row("x(-1) - x0", move |e| e.comp_initial(1, 0) - x0)
        .initial_row("x'(-1) - (tf/2) xdot0", move |e| e.comp_initial(1, 1) - e.time().half_span() * xd0)
        .initial_row("theta(-1) - theta0", move |e| e.comp_initial(2, 0) - th0)
        .initial_row("theta'(-1) - (tf/2) thetadot0", move |e| e.comp_initial(2, 1) - e.time().half_span() * thd0)
        .initial_row("m(-1) - m0", |e| e.comp_initial(3, 0) - 1.0)
        .final_row("h(1)", |e| e.comp_terminal(0, 0))
        .final_row("h'(1)", |e| e.comp_terminal(0, 1))
        .final_row("x(1)", |e| e.comp_terminal(1, 0))
        .final_row("x'(1)", |e| e.comp_terminal(1, 1))
        .final_row("theta(1)", |e| e.comp_terminal(2, 0))
        .final_row("theta'(1)", |e| e.comp_terminal(2, 1))
        .inequality(Inequality::ControlUpper { channel: 1, value: self.delta_max })
        .inequality(Inequality::ControlLower { channel: 1, value: self.delta_min })
        .inequality(Inequality::ControlUpper { channel: 0, value: self.phi_max })
        .inequality(Inequality::ControlLower { channel: 0, value: -self.phi_max })
        .inequality(Inequality::StateUpper { coord: 3, derivative: 0, value: 1.0 })
        .inequality(Inequality::StateLower { coord: 3, derivative: 0, value: self.m_dry / self.m0 })
        .inequality(Inequality::Rate { channel: 0, max: self.phi_rate_max * beta })
        .inequality(Inequality::FinalTimeLower { value: 0.0 })
        .constant("beta", beta)
        .constant("L", l)
        .constant("M", rc.mass)
        .constant("A_ref", self.a_ref)
        .constant("T_max", self.t_max)
        .constant("c1", c1)
        .constant("c2", c2)
        .constant("c3", c3)
        .constant("c4", c4)
        .constant("c5", c5)
        .constant("c6", c6))
    }
}
