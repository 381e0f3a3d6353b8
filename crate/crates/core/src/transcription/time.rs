use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which ends of the time horizon are decision variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    Fixed,
    FreeFinal,
    FreeBoth,
}

impl TimeMode {
    /// Number of entries the mode adds to the free-variable vector.
    pub fn free_count(self) -> usize {
        match self {
            TimeMode::Fixed => 0,
            TimeMode::FreeFinal => 1,
            TimeMode::FreeBoth => 2,
        }
    }
}

/// Affine map between physical time `t in [t0, tf]` and `tau in [-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeMap {
    pub t0: f64,
    pub tf: f64,
}

impl TimeMap {
    pub fn new(t0: f64, tf: f64) -> Result<Self> {
        let tm = Self { t0, tf };
        tm.check()?;
        Ok(tm)
    }

    /// Fails unless `tf - t0 > 0`.
    pub fn check(&self) -> Result<()> {
        let span = self.tf - self.t0;
        if span > 0.0 && span.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain { value: span })
        }
    }

    pub fn span(&self) -> f64 {
        self.tf - self.t0
    }

    /// `dt / dtau = (tf - t0) / 2`.
    pub fn half_span(&self) -> f64 {
        0.5 * (self.tf - self.t0)
    }

    /// `t = (dt/2) tau + (tf + t0)/2`.
    pub fn map(&self, tau: f64) -> f64 {
        self.half_span() * tau + 0.5 * (self.tf + self.t0)
    }

    /// `tau = (2/dt) t - (tf + t0)/dt`.
    pub fn inverse(&self, t: f64) -> f64 {
        (2.0 * t - (self.tf + self.t0)) / self.span()
    }

    /// `(dt/2)^d`: multiplies a physical `d`-th derivative into `tau` units.
    pub fn scale(&self, d: usize) -> f64 {
        self.half_span().powi(d as i32)
    }
}
