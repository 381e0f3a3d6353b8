use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dopic::poly::{BasisSpec, NodeFamily, PolyFamily};
use dopic::problems::{ProblemName, ProblemSettings};
use dopic::solver::{Algorithm, SolverOptions};
use serde::{Deserialize, Serialize};

pub const MIN_ORDER: usize = 10;
pub const MAX_ORDER: usize = 200;

/// Everything that determines a run. Written next to the artifacts so a run
/// can be repeated from its directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDescriptor {
    pub problem: ProblemName,
    /// Optional check on the polynomial family implied by each grid.
    #[serde(default)]
    pub basis: Option<PolyFamily>,
    pub grids: Vec<NodeFamily>,
    pub orders: Vec<usize>,
    #[serde(default = "one")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Solver overrides; unset fields take the problem's recommended options.
    #[serde(default)]
    pub solver: SolverOverrides,
    #[serde(default)]
    pub settings: ProblemSettings,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOverrides {
    pub algorithm: Option<Algorithm>,
    pub max_iterations: Option<usize>,
    pub constraint_tolerance: Option<f64>,
    pub optimality_tolerance: Option<f64>,
    pub finite_difference_step: Option<f64>,
}

impl RunDescriptor {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.grids.is_empty() || self.orders.is_empty() {
            bail!("at least one grid and one order are required");
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if let Some(&n) = self.orders.iter().find(|n| !(MIN_ORDER..=MAX_ORDER).contains(*n)) {
            bail!("order {n} outside [{MIN_ORDER}, {MAX_ORDER}]");
        }
        for &g in &self.grids {
            self.basis_spec(g, self.orders[0])?;
        }
        self.options().validate()?;
        Ok(())
    }

    pub fn basis_spec(&self, grid: NodeFamily, n: usize) -> Result<BasisSpec> {
        Ok(match self.basis {
            Some(family) => BasisSpec::new(family, grid, n)?,
            None => BasisSpec::for_grid(grid, n),
        })
    }

    pub fn options(&self) -> SolverOptions {
        let mut o = self.problem.recommended_options();
        let s = &self.solver;
        if let Some(a) = s.algorithm {
            o.algorithm = a;
        }
        if let Some(v) = s.max_iterations {
            o.max_iterations = v;
        }
        if let Some(v) = s.constraint_tolerance {
            o.constraint_tolerance = v;
        }
        if let Some(v) = s.optimality_tolerance {
            o.optimality_tolerance = v;
        }
        if let Some(v) = s.finite_difference_step {
            o.finite_difference_step = v;
        }
        o.rng_seed = self.seed;
        o
    }

    /// Directory of one (grid, order) cell under `root`.
    pub fn cell_dir(&self, root: &Path, grid: NodeFamily, n: usize) -> PathBuf {
        root.join(format!("{}-{}-n{n}", self.problem, grid))
    }
}

/// `50`, `15:5:50` (start:step:end, inclusive) or `20,30,40`.
pub fn parse_orders(s: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(':').collect();
    let orders = match parts.as_slice() {
        [a, step, b] => {
            let (a, step, b): (usize, usize, usize) = (a.trim().parse()?, step.trim().parse()?, b.trim().parse()?);
            if step == 0 || b < a {
                bail!("bad order range `{s}`");
            }
            (a..=b).step_by(step).collect()
        }
        [single] => single.split(',').map(|v| v.trim().parse::<usize>()).collect::<std::result::Result<_, _>>()?,
        _ => bail!("bad order range `{s}`"),
    };
    Ok(orders)
}

pub fn parse_grids(s: &str) -> Result<Vec<NodeFamily>> {
    if s == "all" {
        return Ok(NodeFamily::ALL.to_vec());
    }
    s.split(',').map(|g| Ok(g.trim().parse::<NodeFamily>()?)).collect()
}
