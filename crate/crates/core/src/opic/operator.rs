//! Integral collocation operator.
//!
//! With the highest derivative written as `y^(q)(tau) = phi(tau) alpha`, the
//! lower levels follow from repeated exact integration:
//!
//! ```text
//! y^(q-m)(tau) = [ phi_{n+m}(tau) P_m - sum_{j=1..m} p_{m-j}(tau) v_j ] alpha
//!              + sum_{j=1..m} p_{m-j}(tau) y^(q-j)(-1)
//! ```
//!
//! where `P_m = B_m ... B_1` chains the integration matrices (shapes
//! `(n+j+1) x (n+j)`), `v_j = phi_{n+j}(-1) P_j` and
//! `p_k(tau) = (tau + 1)^k / k!`.

use nalgebra::{DMatrix, DVector};

use super::weights::IntegrationWeights;
use crate::error::{Error, Result};
use crate::poly::{check_domain, eval_basis, eval_row, BasisMatrix, Grid, PolyFamily};

/// `(tau + 1)^k / k!`, the result of integrating a constant `k` times from -1.
pub fn p_term(k: usize, tau: f64) -> f64 {
    let mut v = 1.0;
    for i in 1..=k {
        v *= (tau + 1.0) / i as f64;
    }
    v
}

/// Precomputed integration operator for one `(family, n, q)` triple on a grid.
#[derive(Debug, Clone)]
pub struct OpicOperator {
    family: PolyFamily,
    n: usize,
    q: usize,
    nodes: Vec<f64>,
    weights: IntegrationWeights,
    integration: Vec<DMatrix<f64>>,
    products: Vec<DMatrix<f64>>,
    lower_bounds: Vec<DVector<f64>>,
    phi_ext: BasisMatrix,
    phi_minus: Vec<f64>,
    phi_plus: Vec<f64>,
    node_maps: Vec<DMatrix<f64>>,
    minus_rows: Vec<DVector<f64>>,
    plus_rows: Vec<DVector<f64>>,
}

impl OpicOperator {
    /// Build every matrix needed to reconstruct levels `0..=q` on `grid`.
    pub fn new(family: PolyFamily, n: usize, q: usize, grid: &Grid) -> Result<Self> {
        if grid.poly_family() != family {
            return Err(Error::Configuration(format!(
                "{} grid cannot carry {family} polynomials",
                grid.family.label()
            )));
        }
        if grid.order != n {
            return Err(Error::Configuration(format!(
                "grid order {} does not match series order {n}",
                grid.order
            )));
        }
        if q < 1 || n < q {
            return Err(Error::InvalidArgument(format!("need n >= q >= 1, got n={n}, q={q}")));
        }
        let weights = IntegrationWeights::for_family(family);
        let integration: Vec<DMatrix<f64>> = (1..=q).map(|j| weights.matrix(n + j)).collect();

        let mut products = Vec::with_capacity(q + 1);
        products.push(DMatrix::identity(n + 1, n + 1));
        for b in &integration {
            let next = b * products.last().unwrap();
            products.push(next);
        }

        let mut phi_minus = vec![0.0; n + q + 1];
        let mut phi_plus = vec![0.0; n + q + 1];
        eval_row(family, -1.0, &mut phi_minus);
        eval_row(family, 1.0, &mut phi_plus);

        let lower_bounds: Vec<DVector<f64>> = (1..=q)
            .map(|j| {
                let row = &phi_minus[..n + j + 1];
                let p = &products[j];
                DVector::from_iterator(
                    n + 1,
                    (0..n + 1).map(|c| (0..n + j + 1).map(|r| row[r] * p[(r, c)]).sum::<f64>()),
                )
            })
            .collect();

        let phi_ext = eval_basis(family, n + q, &grid.nodes)?;

        let mut op = Self {
            family,
            n,
            q,
            nodes: grid.nodes.clone(),
            weights,
            integration,
            products,
            lower_bounds,
            phi_ext,
            phi_minus,
            phi_plus,
            node_maps: Vec::new(),
            minus_rows: Vec::new(),
            plus_rows: Vec::new(),
        };
        let mut node_maps = Vec::with_capacity(q + 1);
        for m in 0..=q {
            let mut map = DMatrix::zeros(n + 1, n + 1);
            for (k, &tau) in op.nodes.iter().enumerate() {
                let row = op.level_row_from(m, op.phi_ext.entries.row(k).iter().copied(), tau);
                map.set_row(k, &row.transpose());
            }
            node_maps.push(map);
        }
        op.minus_rows = (0..=q)
            .map(|m| op.level_row_from(m, op.phi_minus.clone().into_iter(), -1.0))
            .collect();
        op.plus_rows = (0..=q)
            .map(|m| op.level_row_from(m, op.phi_plus.clone().into_iter(), 1.0))
            .collect();
        op.node_maps = node_maps;
        Ok(op)
    }

    fn level_row_from<I: Iterator<Item = f64>>(&self, m: usize, phi: I, tau: f64) -> DVector<f64> {
        let n = self.n;
        let phi: Vec<f64> = phi.take(n + m + 1).collect();
        let p = &self.products[m];
        let mut row = DVector::from_iterator(
            n + 1,
            (0..n + 1).map(|c| (0..n + m + 1).map(|r| phi[r] * p[(r, c)]).sum::<f64>()),
        );
        for j in 1..=m {
            row.axpy(-p_term(m - j, tau), &self.lower_bounds[j - 1], 1.0);
        }
        row
    }

    pub fn family(&self) -> PolyFamily {
        self.family
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn max_level(&self) -> usize {
        self.q
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn integration_weights(&self) -> &IntegrationWeights {
        &self.weights
    }

    /// `B_j`, `1 <= j <= q`.
    pub fn integration_matrix(&self, j: usize) -> &DMatrix<f64> {
        &self.integration[j - 1]
    }

    /// `B_m ... B_1`, shape `(n+m+1) x (n+1)`; the identity for `m = 0`.
    pub fn product_matrix(&self, m: usize) -> &DMatrix<f64> {
        &self.products[m]
    }

    /// Lower-bound row `v_j`, `1 <= j <= q`.
    pub fn lower_bound(&self, j: usize) -> &DVector<f64> {
        &self.lower_bounds[j - 1]
    }

    /// Basis of degrees `0..=n+q` at the grid nodes.
    pub fn extended_basis(&self) -> &BasisMatrix {
        &self.phi_ext
    }

    /// Basis rows at `tau = -1` and `tau = +1` for degrees `0..=n+q`.
    pub fn endpoint_basis(&self) -> (&[f64], &[f64]) {
        (&self.phi_minus, &self.phi_plus)
    }

    /// Matrix mapping `alpha` to the homogeneous part of level `m` at the nodes.
    pub fn level_matrix(&self, m: usize) -> &DMatrix<f64> {
        &self.node_maps[m]
    }

    /// Row mapping `alpha` to level `m` at `tau = -1` (`plus = false`) or `+1`.
    pub fn endpoint_row(&self, m: usize, plus: bool) -> &DVector<f64> {
        if plus {
            &self.plus_rows[m]
        } else {
            &self.minus_rows[m]
        }
    }

    /// Row mapping `alpha` to level `m` at an arbitrary point.
    pub fn level_row(&self, m: usize, tau: f64) -> Result<DVector<f64>> {
        self.check_level(m)?;
        check_domain(tau)?;
        let mut phi = vec![0.0; self.n + m + 1];
        eval_row(self.family, tau, &mut phi);
        Ok(self.level_row_from(m, phi.into_iter(), tau))
    }

    fn check_level(&self, m: usize) -> Result<()> {
        if m > self.q {
            return Err(Error::InvalidArgument(format!(
                "level {m} exceeds the operator's highest derivative order {}",
                self.q
            )));
        }
        Ok(())
    }

    fn check_inputs(&self, alpha: &[f64], init_conds: &[f64], m: usize) -> Result<()> {
        self.check_level(m)?;
        if alpha.len() != self.n + 1 {
            return Err(Error::Layout { expected: self.n + 1, actual: alpha.len() });
        }
        if init_conds.len() < m {
            return Err(Error::InvalidArgument(format!(
                "level {m} needs {m} initial conditions, got {}",
                init_conds.len()
            )));
        }
        Ok(())
    }

    /// `sum_{j=1..m} p_{m-j}(tau) y^(q-j)(-1)` with `init_conds[j-1] = y^(q-j)(-1)`.
    pub fn initial_contribution(m: usize, init_conds: &[f64], tau: f64) -> f64 {
        (1..=m).map(|j| p_term(m - j, tau) * init_conds[j - 1]).sum()
    }

    /// Level `m` (the `(q-m)`-th derivative) at the grid nodes.
    pub fn reconstruct_level(&self, alpha: &[f64], init_conds: &[f64], m: usize) -> Result<Vec<f64>> {
        self.check_inputs(alpha, init_conds, m)?;
        let mut out = vec![0.0; self.n + 1];
        self.apply_level(m, alpha, init_conds, &mut out);
        Ok(out)
    }

    /// Unchecked kernel of [`reconstruct_level`](Self::reconstruct_level).
    pub fn apply_level(&self, m: usize, alpha: &[f64], init_conds: &[f64], out: &mut [f64]) {
        let map = &self.node_maps[m];
        let n1 = self.n + 1;
        out.iter_mut().for_each(|v| *v = 0.0);
        for (c, &a) in alpha.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let col = map.column(c);
            for k in 0..n1 {
                out[k] += col[k] * a;
            }
        }
        if m > 0 {
            for (k, v) in out.iter_mut().enumerate() {
                *v += Self::initial_contribution(m, init_conds, self.nodes[k]);
            }
        }
    }

    /// Level `m` at `tau = -1` or `tau = +1`.
    pub fn apply_endpoint(&self, m: usize, plus: bool, alpha: &[f64], init_conds: &[f64]) -> f64 {
        let row = self.endpoint_row(m, plus);
        let tau = if plus { 1.0 } else { -1.0 };
        row.iter().zip(alpha).map(|(r, a)| r * a).sum::<f64>()
            + Self::initial_contribution(m, init_conds, tau)
    }

    /// Level `m` at arbitrary points in `[-1, 1]`.
    pub fn reconstruct_dense(
        &self,
        alpha: &[f64],
        init_conds: &[f64],
        m: usize,
        points: &[f64],
    ) -> Result<Vec<f64>> {
        self.check_inputs(alpha, init_conds, m)?;
        points
            .iter()
            .map(|&tau| {
                let row = self.level_row(m, tau)?;
                Ok(row.iter().zip(alpha).map(|(r, a)| r * a).sum::<f64>()
                    + Self::initial_contribution(m, init_conds, tau))
            })
            .collect()
    }
}

/// Build the operator; see [`OpicOperator::new`].
pub fn build_operator(family: PolyFamily, n: usize, q: usize, grid: &Grid) -> Result<OpicOperator> {
    OpicOperator::new(family, n, q, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{make_grid, NodeFamily};
    use approx::assert_abs_diff_eq;

    fn op(nodes: NodeFamily, n: usize, q: usize) -> OpicOperator {
        let g = make_grid(nodes, n).unwrap();
        OpicOperator::new(nodes.poly_family(), n, q, &g).unwrap()
    }

    #[test]
    fn first_integration_matrix_entries() {
        let cheb = op(NodeFamily::Cg, 2, 1);
        let b = cheb.integration_matrix(1);
        assert_eq!(b.shape(), (4, 3));
        let expected = [((1, 0), 1.0), ((0, 1), 0.25), ((2, 1), 0.25), ((1, 2), -0.5), ((3, 2), 1.0 / 6.0)];
        for ((r, c), v) in expected {
            assert_abs_diff_eq!(b[(r, c)], v, epsilon = 1e-15);
        }
        assert_eq!(b.iter().filter(|v| **v != 0.0).count(), expected.len());

        let leg = op(NodeFamily::Lg, 2, 1);
        let b = leg.integration_matrix(1);
        let expected = [((1, 0), 1.0), ((0, 1), -1.0 / 6.0), ((2, 1), 1.0 / 3.0), ((1, 2), -0.2), ((3, 2), 0.2)];
        for ((r, c), v) in expected {
            assert_abs_diff_eq!(b[(r, c)], v, epsilon = 1e-15);
        }
    }

    #[test]
    fn first_lower_bound_row_cp1k() {
        // [T_0..T_3](-1) = [1, -1, 1, -1] times B_1:
        //   col 0: -1 * 1           = -1
        //   col 1: 1/4 + 1/4        =  1/2
        //   col 2: -1 * -1/2 - 1/6  =  1/3
        let cheb = op(NodeFamily::Cg, 2, 1);
        let v = cheb.lower_bound(1);
        for (a, b) in v.iter().zip([-1.0, 0.5, 1.0 / 3.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn chain_shapes_and_block_structure() {
        for nodes in NodeFamily::ALL {
            let o = op(nodes, 9, 4);
            for m in 0..=4 {
                assert_eq!(o.product_matrix(m).shape(), (9 + m + 1, 10));
            }
            for j in 2..=4 {
                let bj = o.integration_matrix(j);
                let prev = o.integration_matrix(j - 1);
                assert_eq!(bj.shape(), (9 + j + 1, 9 + j));
                assert_eq!(bj.view((0, 0), prev.shape()), prev.view((0, 0), prev.shape()));
            }
        }
    }

    #[test]
    fn rejects_bad_configuration() {
        let g = make_grid(NodeFamily::Cg, 6).unwrap();
        assert!(matches!(OpicOperator::new(PolyFamily::Legendre, 6, 2, &g), Err(Error::Configuration(_))));
        assert!(matches!(OpicOperator::new(PolyFamily::Cp1k, 5, 2, &g), Err(Error::Configuration(_))));
        let o = OpicOperator::new(PolyFamily::Cp1k, 6, 2, &g).unwrap();
        assert!(o.reconstruct_level(&[0.0; 7], &[0.0, 0.0], 3).is_err());
        assert!(o.reconstruct_level(&[0.0; 6], &[0.0, 0.0], 1).is_err());
    }

    #[test]
    fn pure_initial_condition_terms() {
        for nodes in NodeFamily::ALL {
            let o = op(nodes, 8, 2);
            let y = o.reconstruct_level(&[0.0; 9], &[1.0, 0.0], 2).unwrap();
            for (v, t) in y.iter().zip(o.nodes()) {
                assert_abs_diff_eq!(*v, t + 1.0, epsilon = 1e-14);
            }
            let mut alpha = vec![0.0; 9];
            alpha[0] = 1.0;
            let o1 = op(nodes, 8, 1);
            let y = o1.reconstruct_level(&alpha, &[0.0], 1).unwrap();
            for (v, t) in y.iter().zip(o1.nodes()) {
                assert_abs_diff_eq!(*v, t + 1.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn lower_bound_value_is_initial_condition() {
        let o = op(NodeFamily::Lg, 10, 3);
        let alpha: Vec<f64> = (0..11).map(|i| (i as f64 * 0.7).sin()).collect();
        let ics = [0.3, -1.2, 2.5];
        for m in 1..=3 {
            let v = o.reconstruct_dense(&alpha, &ics, m, &[-1.0]).unwrap()[0];
            assert_abs_diff_eq!(v, ics[m - 1], epsilon = 1e-13);
            assert_abs_diff_eq!(o.apply_endpoint(m, false, &alpha, &ics), ics[m - 1], epsilon = 1e-13);
        }
    }

    #[test]
    fn p_terms() {
        assert_eq!(p_term(0, 0.3), 1.0);
        assert_abs_diff_eq!(p_term(1, 0.3), 1.3, epsilon = 1e-15);
        assert_abs_diff_eq!(p_term(2, 0.3), 0.5 * (0.09 + 0.6 + 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(p_term(3, 0.3), (0.027 + 3.0 * 0.09 + 0.9 + 1.0) / 6.0, epsilon = 1e-15);
    }
}
