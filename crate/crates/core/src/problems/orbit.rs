//! Constant-thrust planar circular orbit raising (normalized units).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opic::OpicOperator;
use crate::transcription::{ControlSpec, CoordinateSpec, Inequality, OcpDefinition, TimeSpec, Transcription};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitMode {
    MinTime,
    MaxRadius,
}

impl fmt::Display for OrbitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbitMode::MinTime => "min_time",
            OrbitMode::MaxRadius => "max_radius",
        })
    }
}

impl FromStr for OrbitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "min_time" => Ok(OrbitMode::MinTime),
            "max_radius" => Ok(OrbitMode::MaxRadius),
            other => Err(Error::InvalidArgument(format!("unknown orbit mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitRaisingProblem {
    pub mode: OrbitMode,
    pub mu: f64,
    pub thrust: f64,
    pub m0: f64,
    pub mdot: f64,
    /// Thrust-angle rate limit in rad/TU.
    pub rate_max: f64,
    /// Target radius (min-time) and fixed horizon (max-radius).
    pub r_final: f64,
    pub vt_final: f64,
    pub tf_fixed: f64,
    /// Final-time guess for the free-time problem.
    pub tf_guess: f64,
}

impl OrbitRaisingProblem {
    pub fn new(mode: OrbitMode) -> Self {
        Self {
            mode,
            mu: 1.0,
            thrust: 0.1405,
            m0: 1.0,
            mdot: -0.07487,
            rate_max: 400f64.to_radians(),
            r_final: 1.525,
            vt_final: 0.8098,
            tf_fixed: 3.32,
            tf_guess: 3.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.mode {
            OrbitMode::MinTime => "orbit-min-time",
            OrbitMode::MaxRadius => "orbit-max-radius",
        }
    }

    /// Coordinates `r` (second order) and `v_t` (first order), control `phi`.
    /// Stage 1 of the staged solve omits the rate block.
    pub fn build(&self, with_rate: bool) -> Result<OcpDefinition> {
        let Self { mu, thrust, m0, mdot, .. } = *self;
        if m0 + mdot * self.tf_fixed.max(self.tf_guess) <= 0.0 {
            return Err(Error::Configuration("orbit mass depleted within the horizon".into()));
        }
        let dynamics = move |p: &crate::transcription::NodePoint<'_>, out: &mut [f64]| {
            let (r, rdot, vt, phi) = (p.state(0, 0), p.state(0, 1), p.state(1, 0), p.control(0));
            let accel = thrust / (m0 + mdot * p.t());
            out[0] = vt * vt / r - mu / (r * r) + accel * phi.sin();
            out[1] = -rdot * vt / r + accel * phi.cos();
        };
        let time = match self.mode {
            OrbitMode::MinTime => TimeSpec::free_final(0.0, self.tf_guess),
            OrbitMode::MaxRadius => TimeSpec::fixed(0.0, self.tf_fixed),
        };
        let mut ocp = OcpDefinition::new(
            self.name(),
            vec![CoordinateSpec::new("r", 2, &[1.0, 0.0]), CoordinateSpec::new("vt", 1, &[1.0])],
            vec![ControlSpec::new("phi")],
            time,
            dynamics,
        )
        .initial_row("r(-1) - r0", |e| e.comp_initial(0, 0) - 1.0)
        .initial_row("r'(-1) - (tf/2) rdot0", |e| e.comp_initial(0, 1))
        .initial_row("vt(-1) - vt0", |e| e.comp_initial(1, 0) - 1.0)
        .constant("mu", mu)
        .constant("u0", thrust)
        .constant("m0", m0)
        .constant("mdot", mdot)
        .constant("phidot_max", self.rate_max);
        ocp = match self.mode {
            OrbitMode::MinTime => {
                let (rf, vf) = (self.r_final, self.vt_final);
                ocp.with_lagrange(|_| 1.0)
                    .final_row("r(1) - rf", move |e| e.comp_terminal(0, 0) - rf)
                    .final_row("r'(1) - (tf/2) rdotf", |e| e.comp_terminal(0, 1))
                    .final_row("vt(1) - vtf", move |e| e.comp_terminal(1, 0) - vf)
                    .constant("rf", rf)
                    .constant("vtf", vf)
            }
            OrbitMode::MaxRadius => ocp
                .with_mayer(|e| -e.terminal(0, 0))
                .final_row("r'(1) - (tf/2) rdotf", |e| e.comp_terminal(0, 1))
                .final_row("vt(1) - sqrt(1/r(tf))", move |e| {
                    e.comp_terminal(1, 0) - (mu / e.comp_terminal(0, 0).max(1e-12)).sqrt()
                })
                .constant("tf", self.tf_fixed),
        };
        ocp = ocp
            .inequality(Inequality::ControlUpper { channel: 0, value: 2.0 * PI })
            .inequality(Inequality::ControlLower { channel: 0, value: 0.0 });
        if with_rate {
            ocp = ocp.inequality(Inequality::Rate { channel: 0, max: self.rate_max });
        }
        if self.mode == OrbitMode::MinTime {
            ocp = ocp.inequality(Inequality::FinalTimeLower { value: 0.0 });
        }
        Ok(ocp)
    }
}

/// Polar angle history recovered from a converged orbit solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarAngle {
    pub t: Vec<f64>,
    pub theta: Vec<f64>,
    /// `theta(tf)` from the endpoint reconstruction.
    pub theta_final: f64,
}

/// Integrate `theta' = v_t / r` with `theta(0) = 0`: fit one coefficient set
/// to the nodal ratio and reconstruct level 0 with a first-order operator.
/// A nodal radius at or below `1e-12` is a domain error.
pub fn recover_polar_angle(transcription: &Transcription, chi: &[f64]) -> Result<PolarAngle> {
    let r_idx = transcription.ocp().coordinate_index("r");
    let v_idx = transcription.ocp().coordinate_index("vt");
    let (Some(ri), Some(vi)) = (r_idx, v_idx) else {
        return Err(Error::Configuration("polar angle needs coordinates `r` and `vt`".into()));
    };
    let traj = transcription.trajectory(chi)?;
    let r = traj.state(ri, 0);
    let vt = traj.state(vi, 0);
    polar_angle_from_nodes(transcription, &traj.t, r, vt, traj.time.half_span())
}

pub(crate) fn polar_angle_from_nodes(
    transcription: &Transcription,
    t: &[f64],
    r: &[f64],
    vt: &[f64],
    half_span: f64,
) -> Result<PolarAngle> {
    if let Some(&bad) = r.iter().find(|v| !(**v > 1e-12)) {
        return Err(Error::Domain { value: bad });
    }
    let spec = transcription.spec();
    let op = OpicOperator::new(spec.family, spec.order, 1, transcription.grid())?;
    let rhs = DVector::from_iterator(r.len(), r.iter().zip(vt).map(|(r, v)| half_span * v / r));
    let phi = op.level_matrix(0).clone();
    let svd = phi.svd(true, true);
    let alpha = svd.solve(&rhs, 1e-14).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let alpha: Vec<f64> = alpha.iter().copied().collect();
    let theta = op.reconstruct_level(&alpha, &[0.0], 1)?;
    let theta_final = op.apply_endpoint(1, true, &alpha, &[0.0]);
    Ok(PolarAngle { t: t.to_vec(), theta, theta_final })
}
