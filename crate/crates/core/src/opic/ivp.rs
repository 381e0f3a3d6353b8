//! Initial value problems solved directly with the collocation operator.

use nalgebra::{DMatrix, DVector};

use super::operator::OpicOperator;
use crate::error::{Error, Result};

const CONDITION_WARNING: f64 = 1e10;

/// Node values of every derivative level reconstructed from one coefficient set.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLevels {
    pub alpha: Vec<f64>,
    /// `init_conds[j-1] = y^(q-j)(-1)`.
    pub init_conds: Vec<f64>,
    /// `levels[m]` holds `y^(q-m)` at the nodes, `m = 0..=q`.
    pub levels: Vec<Vec<f64>>,
}

impl TrajectoryLevels {
    pub fn order(&self) -> usize {
        self.levels.len() - 1
    }

    /// Node values of the `d`-th derivative, `0 <= d <= q`.
    pub fn derivative(&self, d: usize) -> &[f64] {
        &self.levels[self.order() - d]
    }

    fn from_alpha(op: &OpicOperator, q: usize, alpha: Vec<f64>, init_conds: &[f64]) -> Result<Self> {
        let levels = (0..=q)
            .map(|m| op.reconstruct_level(&alpha, init_conds, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { alpha, init_conds: init_conds.to_vec(), levels })
    }
}

fn check_order(op: &OpicOperator, q: usize, init_conds: &[f64]) -> Result<()> {
    if q == 0 || q > op.max_level() {
        return Err(Error::InvalidArgument(format!(
            "ODE order {q} not supported by an operator built for q = {}",
            op.max_level()
        )));
    }
    if init_conds.len() != q {
        return Err(Error::InvalidArgument(format!(
            "order-{q} ODE needs {q} initial conditions, got {}",
            init_conds.len()
        )));
    }
    Ok(())
}

fn condition_estimate(lu_diag: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = lu_diag.fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(d.abs()), hi.max(d.abs())));
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Solve `y^(q) = sum_{d<q} a(d, tau) y^(d) + g(tau)` on `[-1, 1]` with
/// `init_conds[j-1] = y^(q-j)(-1)` by one dense linear solve for `alpha`.
pub fn solve_linear_ivp<A, G>(
    op: &OpicOperator,
    q: usize,
    coefficient: A,
    forcing: G,
    init_conds: &[f64],
) -> Result<TrajectoryLevels>
where
    A: Fn(usize, f64) -> f64,
    G: Fn(f64) -> f64,
{
    check_order(op, q, init_conds)?;
    let n1 = op.order() + 1;
    let nodes = op.nodes();
    let mut system = op.level_matrix(0).clone();
    let mut rhs = DVector::from_iterator(n1, nodes.iter().map(|&t| forcing(t)));
    for d in 0..q {
        let m = q - d;
        let map = op.level_matrix(m);
        for (k, &tau) in nodes.iter().enumerate() {
            let a = coefficient(d, tau);
            if a == 0.0 {
                continue;
            }
            for c in 0..n1 {
                system[(k, c)] -= a * map[(k, c)];
            }
            rhs[k] += a * OpicOperator::initial_contribution(m, init_conds, tau);
        }
    }
    let lu = system.lu();
    let condition = condition_estimate(lu.u().diagonal().iter().copied());
    if condition > CONDITION_WARNING {
        log::warn!("collocation matrix condition estimate {condition:e}");
    }
    let alpha = lu.solve(&rhs).ok_or(Error::Singular { condition })?;
    TrajectoryLevels::from_alpha(op, q, alpha.iter().copied().collect(), init_conds)
}

/// Solve `y^(q) = f(tau, [y, y', ..., y^(q-1)])` by Newton iteration on
/// `alpha` with a forward-difference Jacobian.
pub fn solve_nonlinear_ivp<F>(op: &OpicOperator, q: usize, f: F, init_conds: &[f64]) -> Result<TrajectoryLevels>
where
    F: Fn(f64, &[f64]) -> f64,
{
    const TOL: f64 = 1e-10;
    const MAX_ITER: usize = 50;
    check_order(op, q, init_conds)?;
    let n1 = op.order() + 1;
    let nodes = op.nodes();
    let mut levels = vec![vec![0.0; n1]; q + 1];
    let residual = |alpha: &[f64], levels: &mut Vec<Vec<f64>>| -> Vec<f64> {
        for (m, level) in levels.iter_mut().enumerate() {
            op.apply_level(m, alpha, init_conds, level);
        }
        let mut state = vec![0.0; q];
        (0..n1)
            .map(|k| {
                for (d, s) in state.iter_mut().enumerate() {
                    *s = levels[q - d][k];
                }
                levels[0][k] - f(nodes[k], &state)
            })
            .collect()
    };
    let mut alpha = vec![0.0; n1];
    let mut r = residual(&alpha, &mut levels);
    let mut norm = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for _ in 0..MAX_ITER {
        if norm < TOL {
            return TrajectoryLevels::from_alpha(op, q, alpha, init_conds);
        }
        let mut jac = DMatrix::zeros(n1, n1);
        for c in 0..n1 {
            let h = 1e-7 * alpha[c].abs().max(1.0);
            let mut trial = alpha.clone();
            trial[c] += h;
            let rc = residual(&trial, &mut levels);
            for k in 0..n1 {
                jac[(k, c)] = (rc[k] - r[k]) / h;
            }
        }
        let lu = jac.lu();
        let rhs = DVector::from_vec(r.clone());
        let step = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Singular { condition: condition_estimate(lu.u().diagonal().iter().copied()) })?;
        for (a, s) in alpha.iter_mut().zip(step.iter()) {
            *a -= s;
        }
        r = residual(&alpha, &mut levels);
        norm = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    }
    if norm < TOL {
        return TrajectoryLevels::from_alpha(op, q, alpha, init_conds);
    }
    Err(Error::NewtonDivergence { iterations: MAX_ITER, residual: norm })
}
