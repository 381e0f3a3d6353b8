use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::time::{TimeMap, TimeMode};
use super::trajectory::{Endpoints, NodePoint};

/// Highest physical derivative of every coordinate at one node.
pub type DynamicsFn = dyn Fn(&NodePoint<'_>, &mut [f64]) + Send + Sync;
/// Scalar function of the boundary values (Mayer term, boundary rows).
pub type EndpointFn = dyn Fn(&Endpoints<'_>) -> f64 + Send + Sync;
/// Scalar function of one node (Lagrange integrand).
pub type NodeFn = dyn Fn(&NodePoint<'_>) -> f64 + Send + Sync;

/// One modal coordinate: dynamics of order `order`, one coefficient block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordinateSpec {
    pub name: String,
    pub order: usize,
    /// Physical initial values `y(t0), y'(t0), ...`, one per level below `order`.
    pub initial: Vec<f64>,
}

impl CoordinateSpec {
    pub fn new(name: &str, order: usize, initial: &[f64]) -> Self {
        Self { name: name.to_string(), order, initial: initial.to_vec() }
    }
}

/// One nodal control channel. Box bounds come from the inequality blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSpec {
    pub name: String,
}

impl ControlSpec {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string() }
    }
}

/// Time horizon: mode plus fixed values (or guesses for free ends).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSpec {
    pub mode: TimeMode,
    pub t0: f64,
    pub tf: f64,
}

impl TimeSpec {
    pub fn fixed(t0: f64, tf: f64) -> Self {
        Self { mode: TimeMode::Fixed, t0, tf }
    }

    pub fn free_final(t0: f64, tf_guess: f64) -> Self {
        Self { mode: TimeMode::FreeFinal, t0, tf: tf_guess }
    }

    pub fn guess(&self) -> TimeMap {
        TimeMap { t0: self.t0, tf: self.tf }
    }
}

/// A named scalar equality row evaluated on the boundary values.
pub struct BoundaryRow {
    pub label: String,
    pub eval: Box<EndpointFn>,
}

impl BoundaryRow {
    pub fn new<F>(label: &str, eval: F) -> Self
    where
        F: Fn(&Endpoints<'_>) -> f64 + Send + Sync + 'static,
    {
        Self { label: label.to_string(), eval: Box::new(eval) }
    }
}

impl fmt::Debug for BoundaryRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryRow").field("label", &self.label).finish()
    }
}

/// One block of the inequality vector `Cin <= 0`, in listing order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Inequality {
    /// `u_k - value <= 0` at every node (a variable bound).
    ControlUpper { channel: usize, value: f64 },
    /// `value - u_k <= 0` at every node (a variable bound).
    ControlLower { channel: usize, value: f64 },
    /// `y^(d)(t_k) - value <= 0` at every node.
    StateUpper { coord: usize, derivative: usize, value: f64 },
    /// `value - y^(d)(t_k) <= 0` at every node.
    StateLower { coord: usize, derivative: usize, value: f64 },
    /// `|u_k - u_j| / ((dt/2)(tau_k - tau_j)) - max <= 0` for adjacent nodes.
    Rate { channel: usize, max: f64 },
    /// `value - tf <= 0` (a variable bound).
    FinalTimeLower { value: f64 },
}

impl Inequality {
    /// Number of rows for a grid with `n1` nodes.
    pub fn rows(&self, n1: usize) -> usize {
        match self {
            Inequality::Rate { .. } => n1 - 1,
            Inequality::FinalTimeLower { .. } => 1,
            _ => n1,
        }
    }

    /// True when the block is a pure bound on entries of the free-variable vector.
    pub fn is_bound(&self) -> bool {
        matches!(
            self,
            Inequality::ControlUpper { .. } | Inequality::ControlLower { .. } | Inequality::FinalTimeLower { .. }
        )
    }
}

/// Bolza optimal control problem over coordinates with arbitrary derivative
/// orders and nodal controls.
pub struct OcpDefinition {
    pub name: String,
    pub coordinates: Vec<CoordinateSpec>,
    pub controls: Vec<ControlSpec>,
    pub time: TimeSpec,
    pub dynamics: Box<DynamicsFn>,
    pub mayer: Option<Box<EndpointFn>>,
    pub lagrange: Option<Box<NodeFn>>,
    /// Rows placed before the collocation residuals.
    pub initial_rows: Vec<BoundaryRow>,
    /// Rows placed after the collocation residuals.
    pub final_rows: Vec<BoundaryRow>,
    pub inequalities: Vec<Inequality>,
    /// Problem constants, reported in descriptors only.
    pub constants: BTreeMap<String, f64>,
}

impl OcpDefinition {
    pub fn new<F>(name: &str, coordinates: Vec<CoordinateSpec>, controls: Vec<ControlSpec>, time: TimeSpec, dynamics: F) -> Self
    where
        F: Fn(&NodePoint<'_>, &mut [f64]) + Send + Sync + 'static,
    {
        Self {
            name: name.to_string(),
            coordinates,
            controls,
            time,
            dynamics: Box::new(dynamics),
            mayer: None,
            lagrange: None,
            initial_rows: Vec::new(),
            final_rows: Vec::new(),
            inequalities: Vec::new(),
            constants: BTreeMap::new(),
        }
    }

    pub fn with_mayer<F>(mut self, f: F) -> Self
    where
        F: Fn(&Endpoints<'_>) -> f64 + Send + Sync + 'static,
    {
        self.mayer = Some(Box::new(f));
        self
    }

    pub fn with_lagrange<F>(mut self, f: F) -> Self
    where
        F: Fn(&NodePoint<'_>) -> f64 + Send + Sync + 'static,
    {
        self.lagrange = Some(Box::new(f));
        self
    }

    pub fn initial_row<F>(mut self, label: &str, f: F) -> Self
    where
        F: Fn(&Endpoints<'_>) -> f64 + Send + Sync + 'static,
    {
        self.initial_rows.push(BoundaryRow::new(label, f));
        self
    }

    pub fn final_row<F>(mut self, label: &str, f: F) -> Self
    where
        F: Fn(&Endpoints<'_>) -> f64 + Send + Sync + 'static,
    {
        self.final_rows.push(BoundaryRow::new(label, f));
        self
    }

    pub fn inequality(mut self, block: Inequality) -> Self {
        self.inequalities.push(block);
        self
    }

    pub fn constant(mut self, name: &str, value: f64) -> Self {
        self.constants.insert(name.to_string(), value);
        self
    }

    pub fn max_order(&self) -> usize {
        self.coordinates.iter().map(|c| c.order).max().unwrap_or(0)
    }

    pub fn coordinate_index(&self, name: &str) -> Option<usize> {
        self.coordinates.iter().position(|c| c.name == name)
    }

    pub fn control_index(&self, name: &str) -> Option<usize> {
        self.controls.iter().position(|c| c.name == name)
    }
}

impl fmt::Debug for OcpDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OcpDefinition")
            .field("name", &self.name)
            .field("coordinates", &self.coordinates)
            .field("controls", &self.controls)
            .field("time", &self.time)
            .field("initial_rows", &self.initial_rows)
            .field("final_rows", &self.final_rows)
            .field("inequalities", &self.inequalities)
            .finish_non_exhaustive()
    }
}
