//! Per-figure CSV bundles rebuilt from a run cell's best trial.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dopic::problems::{recover_polar_angle, Benchmark, ProblemName};
use dopic::transcription::assemble_rate_constraints;

use crate::artifacts::{write_table, BestTrial};
use crate::descriptor::RunDescriptor;

struct Bundle {
    columns: Vec<String>,
    series: Vec<Vec<f64>>,
}

impl Bundle {
    fn new() -> Self {
        Self { columns: Vec::new(), series: Vec::new() }
    }

    fn push(&mut self, name: &str, values: Vec<f64>) {
        self.columns.push(name.to_string());
        self.series.push(values);
    }

    fn constant(&mut self, name: &str, value: f64) {
        let len = self.series.first().map_or(0, Vec::len);
        self.push(name, vec![value; len]);
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        let len = self.series.first().map_or(0, Vec::len);
        (0..len).map(|k| self.series.iter().map(|s| s[k]).collect()).collect()
    }
}

/// Write the plot bundle(s) of the run cell in `cell` into `out` (defaults to
/// the cell directory). Returns the files written.
pub fn emit_plot_data(cell: &Path, out: Option<&Path>) -> Result<Vec<PathBuf>> {
    let desc = RunDescriptor::load(&cell.join("descriptor.json"))?;
    let best_path = cell.join("best.json");
    if !best_path.exists() {
        bail!("{} has no trajectory: no trial converged", cell.display());
    }
    let best: BestTrial = serde_json::from_str(&std::fs::read_to_string(&best_path)?)
        .with_context(|| format!("parsing {}", best_path.display()))?;
    let (grid, n) = (desc.grids[0], desc.orders[0]);
    let bench = Benchmark::build(desc.problem, desc.basis_spec(grid, n)?, &desc.settings)?;
    let tr = bench.full();
    let traj = tr.trajectory(&best.chi)?;
    let out = out.unwrap_or(cell);
    std::fs::create_dir_all(out)?;

    let mut b = Bundle::new();
    let name = match desc.problem {
        ProblemName::MinFuel | ProblemName::Breakwell => {
            b.push("t", traj.t.clone());
            b.push("x", traj.state(0, 0).to_vec());
            b.push("x_dot", traj.state(0, 1).to_vec());
            let u = if traj.controls.len() == 2 {
                traj.controls[0].iter().zip(&traj.controls[1]).map(|(p, m)| p - m).collect()
            } else {
                traj.controls[0].clone()
            };
            b.push("u", u);
            if desc.problem == ProblemName::MinFuel {
                b.constant("u_min", -1.0);
                b.constant("u_max", 1.0);
                "plot_min_fuel.csv"
            } else {
                b.constant("x_limit", desc.settings.breakwell.l);
                "plot_breakwell.csv"
            }
        }
        ProblemName::OrbitMinTime | ProblemName::OrbitMaxRadius => {
            b.push("t", traj.t.clone());
            b.push("r", traj.state(0, 0).to_vec());
            b.push("r_dot", traj.state(0, 1).to_vec());
            b.push("vt", traj.state(1, 0).to_vec());
            b.push("phi", traj.controls[0].clone());
            let theta = recover_polar_angle(tr, &best.chi)?;
            b.push("theta", theta.theta);
            "plot_orbit.csv"
        }
        ProblemName::RocketLanding => {
            let p = &desc.settings.rocket;
            let c = p.constants();
            let deg = 180.0 / std::f64::consts::PI;
            let scale = |v: &[f64], s: f64| v.iter().map(|x| x * s).collect::<Vec<f64>>();
            b.push("t_s", scale(&traj.t, c.beta));
            b.push("h_m", scale(traj.state(0, 0), c.length));
            b.push("x_m", scale(traj.state(1, 0), c.length));
            b.push("theta_deg", scale(traj.state(2, 0), deg));
            b.push("m_kg", scale(traj.state(3, 0), c.mass));
            b.push("phi_deg", scale(&traj.controls[0], deg));
            b.push("delta", traj.controls[1].clone());
            // |phi rate| on the interval ending at each node
            let rows = assemble_rate_constraints(&traj.controls[0], traj.time, &traj.tau, 0.0)?;
            let mut rate = vec![f64::NAN];
            rate.extend(rows.iter().map(|r| r * deg / c.beta));
            b.push("phi_rate_deg_s", rate);
            b.constant("phi_rate_max_deg_s", p.phi_rate_max * deg);
            b.constant("phi_max_deg", p.phi_max * deg);
            b.constant("delta_min", p.delta_min);
            b.constant("delta_max", p.delta_max);
            "plot_rocket.csv"
        }
    };
    let path = out.join(name);
    write_table(&path, &b.columns, &b.rows())?;
    Ok(vec![path])
}
