use super::time::TimeMap;

/// All derivative levels of every coordinate at the grid nodes and at both
/// ends of the horizon, in computational (`tau`) and physical (`t`) units.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub time: TimeMap,
    pub tau: Vec<f64>,
    pub t: Vec<f64>,
    /// `comp[c][d][k]`: `d`-th `tau`-derivative of coordinate `c` at node `k`.
    pub comp: Vec<Vec<Vec<f64>>>,
    /// `phys[c][d][k]`: `d`-th time derivative, `comp * (2/dt)^d`.
    pub phys: Vec<Vec<Vec<f64>>>,
    pub controls: Vec<Vec<f64>>,
    /// `[c][d]` values at `tau = -1` and `tau = +1`.
    pub comp_start: Vec<Vec<f64>>,
    pub comp_end: Vec<Vec<f64>>,
    pub phys_start: Vec<Vec<f64>>,
    pub phys_end: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn node(&self, k: usize) -> NodePoint<'_> {
        NodePoint { traj: self, k }
    }

    pub fn endpoints(&self) -> Endpoints<'_> {
        Endpoints { traj: self }
    }

    /// Physical `d`-th derivative of coordinate `c` at every node.
    pub fn state(&self, c: usize, d: usize) -> &[f64] {
        &self.phys[c][d]
    }
}

/// View of one collocation node handed to the dynamics and cost callbacks.
#[derive(Debug, Clone, Copy)]
pub struct NodePoint<'a> {
    traj: &'a Trajectory,
    k: usize,
}

impl NodePoint<'_> {
    pub fn index(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> f64 {
        self.traj.t[self.k]
    }

    pub fn tau(&self) -> f64 {
        self.traj.tau[self.k]
    }

    /// Physical `d`-th time derivative of coordinate `c`.
    pub fn state(&self, c: usize, d: usize) -> f64 {
        self.traj.phys[c][d][self.k]
    }

    pub fn control(&self, j: usize) -> f64 {
        self.traj.controls[j][self.k]
    }

    pub fn time(&self) -> TimeMap {
        self.traj.time
    }
}

/// View of the boundary values handed to Mayer terms and boundary rows.
#[derive(Debug, Clone, Copy)]
pub struct Endpoints<'a> {
    traj: &'a Trajectory,
}

impl Endpoints<'_> {
    /// Physical `d`-th derivative of coordinate `c` at `t0`.
    pub fn initial(&self, c: usize, d: usize) -> f64 {
        self.traj.phys_start[c][d]
    }

    /// Physical `d`-th derivative of coordinate `c` at `tf`.
    pub fn terminal(&self, c: usize, d: usize) -> f64 {
        self.traj.phys_end[c][d]
    }

    /// `d`-th `tau`-derivative of coordinate `c` at `tau = -1`.
    pub fn comp_initial(&self, c: usize, d: usize) -> f64 {
        self.traj.comp_start[c][d]
    }

    /// `d`-th `tau`-derivative of coordinate `c` at `tau = +1`.
    pub fn comp_terminal(&self, c: usize, d: usize) -> f64 {
        self.traj.comp_end[c][d]
    }

    pub fn time(&self) -> TimeMap {
        self.traj.time
    }
}
