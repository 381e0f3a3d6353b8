//! The four benchmark problems: definitions, initialization recipes,
//! staging and analytic oracles.

pub mod analytic;
mod breakwell;
mod min_fuel;
mod orbit;
mod rocket;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use analytic::{
    analytic_breakwell, analytic_min_fuel, min_fuel_minimum_time, BreakwellRegime, BreakwellSolution, MinFuelSolution,
};
pub use breakwell::BreakwellProblem;
pub use min_fuel::MinFuelProblem;
pub use orbit::{recover_polar_angle, OrbitMode, OrbitRaisingProblem, PolarAngle};
pub use rocket::{RocketConstants, RocketLandingProblem};

use crate::error::{Error, Result};
use crate::poly::BasisSpec;
use crate::solver::{batch_run, failed_report, solve, Algorithm, BatchResult, SolveReport, SolverOptions};
use crate::transcription::{ChiPieces, Transcription};

/// Registered problem names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemName {
    MinFuel,
    Breakwell,
    OrbitMinTime,
    OrbitMaxRadius,
    RocketLanding,
}

impl ProblemName {
    pub const ALL: [ProblemName; 5] = [
        ProblemName::MinFuel,
        ProblemName::Breakwell,
        ProblemName::OrbitMinTime,
        ProblemName::OrbitMaxRadius,
        ProblemName::RocketLanding,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemName::MinFuel => "min-fuel",
            ProblemName::Breakwell => "breakwell",
            ProblemName::OrbitMinTime => "orbit-min-time",
            ProblemName::OrbitMaxRadius => "orbit-max-radius",
            ProblemName::RocketLanding => "rocket-landing",
        }
    }

    /// Options the benchmark is solved with unless overridden.
    pub fn recommended_options(self) -> SolverOptions {
        match self {
            ProblemName::RocketLanding => SolverOptions { max_iterations: 3000, ..SolverOptions::interior_point() },
            ProblemName::OrbitMinTime | ProblemName::OrbitMaxRadius => {
                SolverOptions { max_iterations: 1000, ..SolverOptions::default() }
            }
            _ => SolverOptions::default(),
        }
    }
}

impl fmt::Display for ProblemName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown problem `{s}`")))
    }
}

/// Per-problem parameters; defaults reproduce the published cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProblemSettings {
    pub min_fuel: MinFuelProblem,
    pub breakwell: BreakwellProblem,
    pub rocket: RocketLandingProblem,
    /// Solve the orbit problems without the rate block first, then warm-start
    /// the full problem from that solution.
    pub stage_rate_constraints: bool,
}

impl Default for ProblemSettings {
    fn default() -> Self {
        Self {
            min_fuel: MinFuelProblem::default(),
            breakwell: BreakwellProblem::default(),
            rocket: RocketLandingProblem::default(),
            stage_rate_constraints: true,
        }
    }
}

/// Looser tolerances for the intermediate stages, which only supply a
/// starting point for the next one.
pub fn warm_start_options(options: &SolverOptions) -> SolverOptions {
    SolverOptions {
        optimality_tolerance: options.optimality_tolerance.max(1e-3),
        constraint_tolerance: options.constraint_tolerance.max(1e-6),
        ..options.clone()
    }
}

/// A benchmark transcribed on one basis: one or more stages, the last of
/// which is the full problem.
#[derive(Debug)]
pub struct Benchmark {
    name: ProblemName,
    settings: ProblemSettings,
    stages: Vec<Transcription>,
}

impl Benchmark {
    pub fn build(name: ProblemName, basis: BasisSpec, settings: &ProblemSettings) -> Result<Self> {
        let stage = |ocp| Transcription::new(ocp, basis);
        let stages = match name {
            ProblemName::MinFuel => vec![stage(settings.min_fuel.build()?)?],
            ProblemName::Breakwell => vec![stage(settings.breakwell.build()?)?],
            ProblemName::OrbitMinTime | ProblemName::OrbitMaxRadius => {
                let mode = if name == ProblemName::OrbitMinTime { OrbitMode::MinTime } else { OrbitMode::MaxRadius };
                let p = OrbitRaisingProblem::new(mode);
                let mut v = Vec::new();
                if settings.stage_rate_constraints {
                    v.push(stage(p.build(false)?)?);
                }
                v.push(stage(p.build(true)?)?);
                v
            }
            ProblemName::RocketLanding => vec![stage(settings.rocket.build()?)?],
        };
        Ok(Self { name, settings: settings.clone(), stages })
    }

    pub fn name(&self) -> ProblemName {
        self.name
    }

    pub fn settings(&self) -> &ProblemSettings {
        &self.settings
    }

    pub fn stages(&self) -> &[Transcription] {
        &self.stages
    }

    /// The full problem (final stage).
    pub fn full(&self) -> &Transcription {
        self.stages.last().expect("at least one stage")
    }

    pub fn basis(&self) -> BasisSpec {
        self.full().spec()
    }

    /// Random starting point following the published recipe.
    pub fn initial_guess(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let tr = &self.stages[0];
        let layout = tr.layout();
        let n1 = layout.nodes;
        let tau = &tr.grid().nodes;
        let mut uniform = |lo: f64, hi: f64, len: usize| -> Vec<f64> { (0..len).map(|_| rng.gen_range(lo..hi)).collect() };
        match self.name {
            ProblemName::MinFuel | ProblemName::Breakwell => uniform(0.0, 1.0, layout.len()),
            ProblemName::OrbitMinTime | ProblemName::OrbitMaxRadius => {
                let alphas = (0..layout.coordinates).map(|_| uniform(1.0, 2.0, n1)).collect();
                let phi = tau.iter().map(|t| PI * (t + 1.0) / 2.0).collect();
                let tf = layout.tf_index().map(|_| tr.ocp().time.tf);
                layout.pack(&ChiPieces { alphas, controls: vec![phi], t0: None, tf }).expect("layout")
            }
            ProblemName::RocketLanding => {
                let alphas = (0..layout.coordinates).map(|_| uniform(0.0, 1.0, n1)).collect();
                let controls = vec![vec![0.0; n1], vec![0.8; n1]];
                layout
                    .pack(&ChiPieces { alphas, controls, t0: None, tf: Some(tr.ocp().time.tf) })
                    .expect("layout")
            }
        }
    }

    /// Solve the stages in order, each warm-started from the previous one.
    /// A failed stage ends the chain; iterations and wall time accumulate.
    pub fn solve_from(&self, x0: &[f64], options: &SolverOptions) -> Result<SolveReport> {
        let mut x = x0.to_vec();
        let mut iterations = 0;
        let mut wall = 0.0;
        let mut report = None;
        let last = self.stages.len() - 1;
        for (i, tr) in self.stages.iter().enumerate() {
            let opts = if i < last { warm_start_options(options) } else { options.clone() };
            let mut r = solve(tr, &x, &opts)?;
            log::debug!("stage status {:?} after {} iterations", r.status, r.iterations);
            iterations += r.iterations;
            wall += r.wall_time;
            r.iterations = iterations;
            r.wall_time = wall;
            let ok = r.converged;
            x = r.chi.clone();
            report = Some(r);
            if !ok {
                break;
            }
        }
        Ok(report.expect("at least one stage"))
    }

    /// One random-start trial; evaluation errors become failed reports.
    pub fn run_trial(&self, rng: &mut ChaCha8Rng, options: &SolverOptions) -> SolveReport {
        let x0 = self.initial_guess(rng);
        self.solve_from(&x0, options).unwrap_or_else(|e| failed_report(&e, self.full().layout().len()))
    }

    /// `trials` random-start trials in parallel; trial `i` is seeded with
    /// `options.rng_seed + i`.
    pub fn batch(&self, trials: usize, options: &SolverOptions) -> Result<BatchResult> {
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        options.validate()?;
        Ok(batch_run(trials, options.rng_seed, |_, rng| self.run_trial(rng, options)))
    }

    /// Problem-specific figures of merit in reporting units.
    pub fn metrics(&self, chi: &[f64]) -> Result<BTreeMap<String, f64>> {
        let tr = self.full();
        let traj = tr.trajectory(chi)?;
        let ends = traj.endpoints();
        let mut m = BTreeMap::new();
        m.insert("objective".to_string(), tr.cost(chi)?);
        match self.name {
            ProblemName::MinFuel => {
                let exact = self.settings.min_fuel.analytic()?;
                m.insert("analytic_objective".into(), exact.cost);
                m.insert("t1".into(), exact.t1);
                m.insert("t2".into(), exact.t2);
            }
            ProblemName::Breakwell => {
                m.insert("analytic_objective".into(), self.settings.breakwell.analytic()?.cost);
                let xmax = traj.state(0, 0).iter().copied().fold(f64::NEG_INFINITY, f64::max);
                m.insert("x_max".into(), xmax);
            }
            ProblemName::OrbitMinTime | ProblemName::OrbitMaxRadius => {
                m.insert("tf".into(), traj.time.tf);
                m.insert("rf".into(), ends.terminal(0, 0));
                m.insert("vtf".into(), ends.terminal(1, 0));
                if let Ok(theta) = recover_polar_angle(tr, chi) {
                    m.insert("theta_f".into(), theta.theta_final);
                }
            }
            ProblemName::RocketLanding => {
                let c = self.settings.rocket.constants();
                m.insert("mf_kg".into(), ends.terminal(3, 0) * c.mass);
                m.insert("tf_s".into(), traj.time.tf * c.beta);
            }
        }
        Ok(m)
    }

    /// The solver algorithm used unless the caller overrides it.
    pub fn default_algorithm(&self) -> Algorithm {
        self.name.recommended_options().algorithm
    }
}
