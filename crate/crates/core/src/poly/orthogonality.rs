use nalgebra::DMatrix;

use super::basis::eval_basis;
use super::{Grid, NodeFamily, PolyFamily};
use crate::error::{Error, Result};

/// Discrete Gram matrix of degrees `0..=degree_max` on `grid`, using the
/// discrete inner product under which the family is orthogonal there:
///
/// * CG: unit weights.
/// * CGL: unit weights with the two endpoint terms halved.
/// * CP2K zeros: weights `1 - tau_k^2` (the endpoint terms would vanish).
/// * LG / LGL: the Gauss quadrature weights.
pub fn discrete_gram(family: PolyFamily, grid: &Grid, degree_max: usize) -> Result<DMatrix<f64>> {
    if grid.poly_family() != family {
        return Err(Error::Configuration(format!(
            "{} grid is not paired with {family}",
            grid.family.label()
        )));
    }
    let phi = eval_basis(family, degree_max, &grid.nodes)?.entries;
    let last = grid.len() - 1;
    let weights: Vec<f64> = grid
        .nodes
        .iter()
        .enumerate()
        .map(|(k, &t)| match grid.family {
            NodeFamily::Cg => 1.0,
            NodeFamily::Cgl => {
                if k == 0 || k == last {
                    0.5
                } else {
                    1.0
                }
            }
            NodeFamily::Cp2kZeros => 1.0 - t * t,
            NodeFamily::Lg | NodeFamily::Lgl => grid.weights[k],
        })
        .collect();
    let mut gram = DMatrix::zeros(degree_max + 1, degree_max + 1);
    for i in 0..=degree_max {
        for j in i..=degree_max {
            let s: f64 = (0..grid.len()).map(|k| weights[k] * phi[(k, i)] * phi[(k, j)]).sum();
            gram[(i, j)] = s;
            gram[(j, i)] = s;
        }
    }
    Ok(gram)
}

/// Largest off-diagonal discrete inner product over the degree range in
/// which the family is discretely orthogonal on `grid` (`0..=n`, or
/// `0..=n-1` for the CP2K zeros).
pub fn discrete_orthogonality_check(family: PolyFamily, grid: &Grid) -> Result<f64> {
    let degree_max = match grid.family {
        NodeFamily::Cp2kZeros => grid.order - 1,
        _ => grid.order,
    };
    let gram = discrete_gram(family, grid, degree_max)?;
    let mut worst: f64 = 0.0;
    for i in 0..=degree_max {
        for j in 0..=degree_max {
            if i != j {
                worst = worst.max(gram[(i, j)].abs());
            }
        }
    }
    Ok(worst)
}
