use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::layout::ChiLayout;
use super::ocp::{CoordinateSpec, ControlSpec, Inequality, OcpDefinition, TimeSpec};
use super::time::{TimeMap, TimeMode};
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::opic::OpicOperator;
use crate::poly::{make_grid, BasisSpec, Grid};
use crate::solver::NlpProblem;

/// An optimal control problem transcribed onto one basis and grid.
#[derive(Debug)]
pub struct Transcription {
    ocp: OcpDefinition,
    spec: BasisSpec,
    grid: Grid,
    op: OpicOperator,
    layout: ChiLayout,
    n_eq: usize,
    n_in: usize,
    n_in_full: usize,
}

/// Serializable summary of a transcribed problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDescriptor {
    pub name: String,
    pub basis: BasisSpec,
    pub coordinates: Vec<CoordinateSpec>,
    pub controls: Vec<ControlSpec>,
    pub time: TimeSpec,
    pub constants: BTreeMap<String, f64>,
    pub layout: ChiLayout,
    pub equality_rows: Vec<String>,
    pub inequalities: Vec<Inequality>,
    pub num_equalities: usize,
    pub num_inequalities: usize,
}

/// Column-major table of named series, used for trajectory output.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Transcription {
    pub fn new(ocp: OcpDefinition, spec: BasisSpec) -> Result<Self> {
        if ocp.coordinates.is_empty() {
            return Err(Error::Configuration("problem has no coordinates".into()));
        }
        for c in &ocp.coordinates {
            if c.order == 0 || c.initial.len() != c.order {
                return Err(Error::Configuration(format!(
                    "coordinate {} of order {} needs {} initial values, got {}",
                    c.name,
                    c.order,
                    c.order,
                    c.initial.len()
                )));
            }
        }
        let q = ocp.max_order();
        if spec.order < q.max(2) {
            return Err(Error::Configuration(format!("series order {} below derivative order {q}", spec.order)));
        }
        let grid = make_grid(spec.nodes, spec.order)?;
        let op = OpicOperator::new(spec.family, spec.order, q, &grid)?;
        let n1 = spec.order + 1;
        let layout = ChiLayout {
            nodes: n1,
            coordinates: ocp.coordinates.len(),
            controls: ocp.controls.len(),
            time_mode: ocp.time.mode,
        };
        for block in &ocp.inequalities {
            let ok = match *block {
                Inequality::ControlUpper { channel, .. }
                | Inequality::ControlLower { channel, .. }
                | Inequality::Rate { channel, .. } => channel < layout.controls,
                Inequality::StateUpper { coord, derivative, .. } | Inequality::StateLower { coord, derivative, .. } => {
                    coord < layout.coordinates && derivative <= ocp.coordinates[coord].order
                }
                Inequality::FinalTimeLower { .. } => ocp.time.mode != TimeMode::Fixed,
            };
            if !ok {
                return Err(Error::Configuration(format!("inequality block {block:?} does not fit the problem")));
            }
        }
        let n_eq = ocp.initial_rows.len() + ocp.final_rows.len() + layout.coordinates * n1;
        let n_in = ocp.inequalities.iter().filter(|b| !b.is_bound()).map(|b| b.rows(n1)).sum();
        let n_in_full = ocp.inequalities.iter().map(|b| b.rows(n1)).sum();
        Ok(Self { ocp, spec, grid, op, layout, n_eq, n_in, n_in_full })
    }

    pub fn ocp(&self) -> &OcpDefinition {
        &self.ocp
    }

    pub fn spec(&self) -> BasisSpec {
        self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn operator(&self) -> &OpicOperator {
        &self.op
    }

    pub fn layout(&self) -> ChiLayout {
        self.layout
    }

    /// Length of the full inequality listing, variable bounds included.
    pub fn num_inequalities_full(&self) -> usize {
        self.n_in_full
    }

    /// Time map encoded by `chi` (free ends read from `chi`).
    pub fn time_map(&self, chi: &[f64]) -> TimeMap {
        let t0 = self.layout.t0_index().map_or(self.ocp.time.t0, |i| chi[i]);
        let tf = self.layout.tf_index().map_or(self.ocp.time.tf, |i| chi[i]);
        TimeMap { t0, tf }
    }

    /// Reconstruct every level of every coordinate from `chi`.
    pub fn trajectory(&self, chi: &[f64]) -> Result<Trajectory> {
        self.layout.check(chi)?;
        let time = self.time_map(chi);
        time.check()?;
        Ok(self.reconstruct(chi, time))
    }

    fn reconstruct(&self, chi: &[f64], time: TimeMap) -> Trajectory {
        let n1 = self.layout.nodes;
        let nodes = self.grid.nodes.clone();
        let t = nodes.iter().map(|&tau| time.map(tau)).collect();
        let inv = 1.0 / time.half_span();
        let mut comp = Vec::with_capacity(self.layout.coordinates);
        let mut phys = Vec::with_capacity(self.layout.coordinates);
        let mut comp_start = Vec::new();
        let mut comp_end = Vec::new();
        let mut phys_start = Vec::new();
        let mut phys_end = Vec::new();
        for (c, coord) in self.ocp.coordinates.iter().enumerate() {
            let q = coord.order;
            let alpha = self.layout.alpha(chi, c);
            // init[j-1] = y^(q-j)(-1) in tau units
            let init: Vec<f64> = (1..=q).map(|j| coord.initial[q - j] * time.scale(q - j)).collect();
            let mut levels = vec![vec![0.0; n1]; q + 1];
            let mut start = vec![0.0; q + 1];
            let mut end = vec![0.0; q + 1];
            for d in 0..=q {
                let m = q - d;
                self.op.apply_level(m, alpha, &init, &mut levels[d]);
                // below the top level the lower endpoint is the prescribed value
                start[d] = if d < q { init[m - 1] } else { self.op.apply_endpoint(0, false, alpha, &init) };
                end[d] = self.op.apply_endpoint(m, true, alpha, &init);
            }
            let scale: Vec<f64> = (0..=q).map(|d| inv.powi(d as i32)).collect();
            phys.push(
                levels.iter().zip(&scale).map(|(l, s)| l.iter().map(|v| v * s).collect()).collect::<Vec<Vec<f64>>>(),
            );
            phys_start.push(start.iter().zip(&scale).map(|(v, s)| v * s).collect());
            phys_end.push(end.iter().zip(&scale).map(|(v, s)| v * s).collect());
            comp.push(levels);
            comp_start.push(start);
            comp_end.push(end);
        }
        let controls = (0..self.layout.controls).map(|j| self.layout.control(chi, j).to_vec()).collect();
        Trajectory { time, tau: nodes, t, comp, phys, controls, comp_start, comp_end, phys_start, phys_end }
    }

    fn dynamics_at_nodes(&self, traj: &Trajectory) -> Vec<Vec<f64>> {
        let nc = self.layout.coordinates;
        let mut f = vec![vec![0.0; traj.len()]; nc];
        let mut buf = vec![0.0; nc];
        for k in 0..traj.len() {
            (self.ocp.dynamics)(&traj.node(k), &mut buf);
            for c in 0..nc {
                f[c][k] = buf[c];
            }
        }
        f
    }

    fn residual_into(&self, traj: &Trajectory, out: &mut [f64]) {
        let f = self.dynamics_at_nodes(traj);
        let n1 = traj.len();
        for (c, coord) in self.ocp.coordinates.iter().enumerate() {
            let s = traj.time.scale(coord.order);
            let top = &traj.comp[c][coord.order];
            for k in 0..n1 {
                out[c * n1 + k] = top[k] - s * f[c][k];
            }
        }
    }

    /// Stacked collocation residuals `Xi_c = Phi alpha_c - (dt/2)^q_c f_c`.
    pub fn collocation_residual(&self, chi: &[f64]) -> Result<Vec<f64>> {
        let traj = self.trajectory(chi)?;
        let mut out = vec![0.0; self.layout.coordinates * traj.len()];
        self.residual_into(&traj, &mut out);
        if let Some(i) = out.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteEvaluation { source_name: "dynamics".into(), index: i % traj.len() });
        }
        Ok(out)
    }

    fn equalities_into(&self, traj: &Trajectory, out: &mut [f64]) {
        let ends = traj.endpoints();
        let a = self.ocp.initial_rows.len();
        for (i, row) in self.ocp.initial_rows.iter().enumerate() {
            out[i] = (row.eval)(&ends);
        }
        let nx = self.layout.coordinates * traj.len();
        self.residual_into(traj, &mut out[a..a + nx]);
        for (i, row) in self.ocp.final_rows.iter().enumerate() {
            out[a + nx + i] = (row.eval)(&ends);
        }
    }

    /// Full equality vector `[psi_0; Xi; psi_f]`.
    pub fn equalities(&self, chi: &[f64]) -> Result<Vec<f64>> {
        let traj = self.trajectory(chi)?;
        let mut out = vec![0.0; self.n_eq];
        self.equalities_into(&traj, &mut out);
        Ok(out)
    }

    /// `smooth` evaluates rate rows as `(v^2 - max^2) / (2 max)`: same sign as
    /// `|v| - max`, equal to it to first order on the boundary, no kink at `v = 0`.
    fn block_into(&self, block: &Inequality, traj: &Trajectory, out: &mut [f64], smooth: bool) {
        match *block {
            Inequality::ControlUpper { channel, value } => {
                for (o, u) in out.iter_mut().zip(&traj.controls[channel]) {
                    *o = u - value;
                }
            }
            Inequality::ControlLower { channel, value } => {
                for (o, u) in out.iter_mut().zip(&traj.controls[channel]) {
                    *o = value - u;
                }
            }
            Inequality::StateUpper { coord, derivative, value } => {
                for (o, y) in out.iter_mut().zip(traj.state(coord, derivative)) {
                    *o = y - value;
                }
            }
            Inequality::StateLower { coord, derivative, value } => {
                for (o, y) in out.iter_mut().zip(traj.state(coord, derivative)) {
                    *o = value - y;
                }
            }
            Inequality::Rate { channel, max } => {
                rate_rows(&traj.controls[channel], traj.time.half_span(), &traj.tau, max, out);
                if smooth && max > 0.0 {
                    for o in out.iter_mut() {
                        let v = *o + max;
                        *o = (v * v - max * max) / (2.0 * max);
                    }
                }
            }
            Inequality::FinalTimeLower { value } => out[0] = value - traj.time.tf,
        }
    }

    /// Every inequality row in listing order, bounds included.
    pub fn inequalities_full(&self, chi: &[f64]) -> Result<Vec<f64>> {
        let traj = self.trajectory(chi)?;
        let mut out = vec![0.0; self.n_in_full];
        let mut at = 0;
        for block in &self.ocp.inequalities {
            let r = block.rows(traj.len());
            self.block_into(block, &traj, &mut out[at..at + r], false);
            at += r;
        }
        Ok(out)
    }

    fn general_inequalities_into(&self, traj: &Trajectory, out: &mut [f64]) {
        let mut at = 0;
        for block in self.ocp.inequalities.iter().filter(|b| !b.is_bound()) {
            let r = block.rows(traj.len());
            self.block_into(block, traj, &mut out[at..at + r], true);
            at += r;
        }
    }

    fn cost_of(&self, traj: &Trajectory) -> f64 {
        let mut j = self.ocp.mayer.as_ref().map_or(0.0, |m| m(&traj.endpoints()));
        if let Some(g) = &self.ocp.lagrange {
            let sum: f64 = (0..traj.len()).map(|k| g(&traj.node(k)) * self.grid.weights[k]).sum();
            j += traj.time.half_span() * sum;
        }
        j
    }

    /// `J = phi + (dt/2) sum_k g_k w_k`.
    pub fn cost(&self, chi: &[f64]) -> Result<f64> {
        Ok(self.cost_of(&self.trajectory(chi)?))
    }

    pub fn equality_labels(&self) -> Vec<String> {
        let n1 = self.layout.nodes;
        let mut labels: Vec<String> = self.ocp.initial_rows.iter().map(|r| r.label.clone()).collect();
        for c in &self.ocp.coordinates {
            labels.extend((0..n1).map(|k| format!("xi_{}[{k}]", c.name)));
        }
        labels.extend(self.ocp.final_rows.iter().map(|r| r.label.clone()));
        labels
    }

    pub fn descriptor(&self) -> ProblemDescriptor {
        ProblemDescriptor {
            name: self.ocp.name.clone(),
            basis: self.spec,
            coordinates: self.ocp.coordinates.clone(),
            controls: self.ocp.controls.clone(),
            time: self.ocp.time,
            constants: self.ocp.constants.clone(),
            layout: self.layout,
            equality_rows: self.equality_labels(),
            inequalities: self.ocp.inequalities.clone(),
            num_equalities: self.n_eq,
            num_inequalities: self.n_in_full,
        }
    }

    /// Nodal table: time, every level of every coordinate, controls,
    /// collocation residuals and the nodal values of each inequality block.
    /// Rate rows belong to the interval ending at their node; node 0 is NaN.
    pub fn trajectory_table(&self, chi: &[f64]) -> Result<Table> {
        let traj = self.trajectory(chi)?;
        let n1 = traj.len();
        let mut columns = vec!["t".to_string(), "tau".to_string()];
        let mut series: Vec<Vec<f64>> = vec![traj.t.clone(), traj.tau.clone()];
        for (c, coord) in self.ocp.coordinates.iter().enumerate() {
            for d in 0..=coord.order {
                columns.push(if d == 0 { coord.name.clone() } else { format!("{}_d{d}", coord.name) });
                series.push(traj.phys[c][d].clone());
            }
        }
        for (j, ctrl) in self.ocp.controls.iter().enumerate() {
            columns.push(ctrl.name.clone());
            series.push(traj.controls[j].clone());
        }
        let mut xi = vec![0.0; self.layout.coordinates * n1];
        self.residual_into(&traj, &mut xi);
        for (c, coord) in self.ocp.coordinates.iter().enumerate() {
            columns.push(format!("xi_{}", coord.name));
            series.push(xi[c * n1..(c + 1) * n1].to_vec());
        }
        for (b, block) in self.ocp.inequalities.iter().enumerate() {
            if matches!(block, Inequality::FinalTimeLower { .. }) {
                continue;
            }
            let mut vals = vec![0.0; block.rows(n1)];
            self.block_into(block, &traj, &mut vals, false);
            if vals.len() < n1 {
                vals.insert(0, f64::NAN);
            }
            columns.push(format!("cin{b}_{}", block_tag(block)));
            series.push(vals);
        }
        let rows = (0..n1).map(|k| series.iter().map(|s| s[k]).collect()).collect();
        Ok(Table { columns, rows })
    }
}

fn block_tag(block: &Inequality) -> &'static str {
    match block {
        Inequality::ControlUpper { .. } => "control_upper",
        Inequality::ControlLower { .. } => "control_lower",
        Inequality::StateUpper { .. } => "state_upper",
        Inequality::StateLower { .. } => "state_lower",
        Inequality::Rate { .. } => "rate",
        Inequality::FinalTimeLower { .. } => "final_time",
    }
}

fn rate_rows(u: &[f64], half_span: f64, tau: &[f64], max: f64, out: &mut [f64]) {
    for k in 1..u.len() {
        out[k - 1] = (u[k] - u[k - 1]).abs() / (half_span * (tau[k] - tau[k - 1])) - max;
    }
}

/// `|u_k - u_j| / ((dt/2)(tau_k - tau_j)) - rate_max` for each adjacent node
/// pair in ascending `tau`; `n` rows for `n + 1` nodes.
pub fn assemble_rate_constraints(control: &[f64], time: TimeMap, nodes: &[f64], rate_max: f64) -> Result<Vec<f64>> {
    time.check()?;
    if control.len() != nodes.len() {
        return Err(Error::Layout { expected: nodes.len(), actual: control.len() });
    }
    if let Some(k) = nodes.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::Configuration(format!("nodes {k} and {} coincide or are out of order", k + 1)));
    }
    let mut out = vec![0.0; nodes.len().saturating_sub(1)];
    rate_rows(control, time.half_span(), nodes, rate_max, &mut out);
    Ok(out)
}

impl NlpProblem for Transcription {
    fn num_variables(&self) -> usize {
        self.layout.len()
    }

    fn num_equalities(&self) -> usize {
        self.n_eq
    }

    fn num_inequalities(&self) -> usize {
        self.n_in
    }

    fn lower_bounds(&self) -> Vec<f64> {
        let mut lo = vec![f64::NEG_INFINITY; self.layout.len()];
        for block in &self.ocp.inequalities {
            match *block {
                Inequality::ControlLower { channel, value } => {
                    let o = self.layout.control_offset(channel);
                    for v in &mut lo[o..o + self.layout.nodes] {
                        *v = v.max(value);
                    }
                }
                Inequality::FinalTimeLower { value } => {
                    let i = self.layout.tf_index().expect("checked at construction");
                    lo[i] = lo[i].max(value);
                }
                _ => {}
            }
        }
        lo
    }

    fn upper_bounds(&self) -> Vec<f64> {
        let mut hi = vec![f64::INFINITY; self.layout.len()];
        for block in &self.ocp.inequalities {
            if let Inequality::ControlUpper { channel, value } = *block {
                let o = self.layout.control_offset(channel);
                for v in &mut hi[o..o + self.layout.nodes] {
                    *v = v.min(value);
                }
            }
        }
        hi
    }

    fn evaluate(&self, x: &[f64], eq: &mut [f64], ineq: &mut [f64]) -> f64 {
        let time = self.time_map(x);
        if time.check().is_err() {
            eq.iter_mut().chain(ineq.iter_mut()).for_each(|v| *v = f64::NAN);
            return f64::NAN;
        }
        let traj = self.reconstruct(x, time);
        self.equalities_into(&traj, eq);
        self.general_inequalities_into(&traj, ineq);
        self.cost_of(&traj)
    }
}
