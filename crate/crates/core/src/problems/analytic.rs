//! Closed-form optimal solutions used as oracles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Three-arc (`-1 / 0 / +1`) solution of `min int |u|`, `x'' = u`, `|u| <= 1`,
/// from `(x0, v0)` to the origin in fixed time `tf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinFuelSolution {
    pub x0: f64,
    pub v0: f64,
    pub tf: f64,
    /// End of the braking arc.
    pub t1: f64,
    /// Start of the final accelerating arc.
    pub t2: f64,
    pub cost: f64,
}

/// Shortest time to reach the origin under `|u| <= 1`.
pub fn min_fuel_minimum_time(x0: f64, v0: f64) -> f64 {
    v0 + (4.0 * x0 + 2.0 * v0 * v0).sqrt()
}

/// Bang-zero-bang solution. With `s = t1 - v0` (the reverse speed reached),
/// continuity and the terminal conditions reduce to
/// `s^2 - (tf - v0) s + x0 + v0^2/2 = 0`; the smaller root is optimal and
/// the cost is `v0 + 2 s`.
pub fn analytic_min_fuel(x0: f64, v0: f64, tf: f64) -> Result<MinFuelSolution> {
    if v0 < 0.0 || x0 < -0.5 * v0 * v0 {
        return Err(Error::InvalidArgument(format!("initial state ({x0}, {v0}) outside the bang-zero-bang family")));
    }
    let b = tf - v0;
    let disc = b * b - 4.0 * (x0 + 0.5 * v0 * v0);
    if tf < min_fuel_minimum_time(x0, v0) - 1e-12 || disc < 0.0 {
        return Err(Error::InvalidArgument(format!("final time {tf} below the minimum time")));
    }
    let s = 0.5 * (b - disc.max(0.0).sqrt());
    Ok(MinFuelSolution { x0, v0, tf, t1: v0 + s, t2: tf - s, cost: v0 + 2.0 * s })
}

impl MinFuelSolution {
    pub fn control(&self, t: f64) -> f64 {
        if t < self.t1 {
            -1.0
        } else if t <= self.t2 {
            0.0
        } else {
            1.0
        }
    }

    /// `(x, xdot)` at time `t`.
    pub fn state(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(0.0, self.tf);
        let x1 = self.x0 + self.v0 * self.t1 - 0.5 * self.t1 * self.t1;
        let v1 = self.v0 - self.t1;
        if t <= self.t1 {
            (self.x0 + self.v0 * t - 0.5 * t * t, self.v0 - t)
        } else if t <= self.t2 {
            (x1 + v1 * (t - self.t1), v1)
        } else {
            let x2 = x1 + v1 * (self.t2 - self.t1);
            let dt = t - self.t2;
            (x2 + v1 * dt + 0.5 * dt * dt, v1 + dt)
        }
    }
}

/// Solution regime of the Breakwell problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakwellRegime {
    /// `l >= 1/4`: constraint inactive.
    Parabolic,
    /// `1/6 <= l < 1/4`: cubic arcs touching the bound at `t = 1/2`.
    Osculating,
    /// `l < 1/6`: cubic arcs joined by a boundary arc on `[3l, 1 - 3l]`.
    Bifurcated,
}

/// Optimal solution of `min 1/2 int u^2`, `x'' = u`, `x(0) = x(1) = 0`,
/// `x'(0) = 1`, `x'(1) = -1`, `x <= l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakwellSolution {
    pub l: f64,
    pub regime: BreakwellRegime,
    pub cost: f64,
}

pub fn analytic_breakwell(l: f64) -> Result<BreakwellSolution> {
    if !(l > 0.0) {
        return Err(Error::InvalidArgument(format!("bound l = {l} must be positive")));
    }
    let (regime, cost) = if l >= 0.25 {
        (BreakwellRegime::Parabolic, 2.0)
    } else if l >= 1.0 / 6.0 {
        // integral of (2a + 6bt)^2 over [0, 1/2], twice, halved
        (BreakwellRegime::Osculating, 96.0 * l * l - 48.0 * l + 8.0)
    } else {
        (BreakwellRegime::Bifurcated, 4.0 / (9.0 * l))
    };
    Ok(BreakwellSolution { l, regime, cost })
}

impl BreakwellSolution {
    /// `(x, x', u)` at `t in [0, 1]`; the solution is symmetric about 1/2.
    pub fn evaluate(&self, t: f64) -> (f64, f64, f64) {
        let t = t.clamp(0.0, 1.0);
        let (mirror, tt) = if t > 0.5 { (true, 1.0 - t) } else { (false, t) };
        let l = self.l;
        let (x, v, u) = match self.regime {
            BreakwellRegime::Parabolic => (tt - tt * tt, 1.0 - 2.0 * tt, -2.0),
            BreakwellRegime::Osculating => {
                let a = 12.0 * l - 4.0;
                let b = 4.0 - 16.0 * l;
                (tt + a * tt * tt + b * tt.powi(3), 1.0 + 2.0 * a * tt + 3.0 * b * tt * tt, 2.0 * a + 6.0 * b * tt)
            }
            BreakwellRegime::Bifurcated => {
                if tt < 3.0 * l {
                    let w = 1.0 - tt / (3.0 * l);
                    (l * (1.0 - w.powi(3)), w * w, -2.0 * w / (3.0 * l))
                } else {
                    (l, 0.0, 0.0)
                }
            }
        };
        if mirror {
            (x, -v, u)
        } else {
            (x, v, u)
        }
    }
}
