//! Node grids on `[-1, 1]` and their quadrature weights.
//!
//! The cosine formulas generate nodes in descending order; every grid is
//! stored ascending so that adjacent-node differences are positive.
//!
//! Chebyshev-family weights use the standard closed forms: Fejér's first rule
//! on CG nodes, Clenshaw-Curtis on CGL nodes and Fejér's second rule on the
//! CP2K zeros, each accepted only after a polynomial-exactness self-check.

use std::f64::consts::PI;

use super::basis::{eval_single, legendre_with_derivative};
use super::{NodeFamily, PolyFamily};
use crate::error::{Error, Result};

const NEWTON_TOLERANCE: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;
const EXACTNESS_TOLERANCE: f64 = 1e-11;

/// Interpolation nodes and their quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub family: NodeFamily,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn poly_family(&self) -> PolyFamily {
        self.family.poly_family()
    }

    /// `sum_k w_k f(tau_k)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * f(t)).sum()
    }
}

/// Build the `n + 1` point grid of `family`, ascending, with weights attached.
pub fn make_grid(family: NodeFamily, n: usize) -> Result<Grid> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("grid order must be at least 1, got {n}")));
    }
    let nodes = match family {
        NodeFamily::Cg => {
            let np1 = (n + 1) as f64;
            ascending((0..=n).map(|k| ((k as f64 + 0.5) * PI / np1).cos()))
        }
        NodeFamily::Cgl => {
            let mut nodes = ascending((0..=n).map(|k| (k as f64 * PI / n as f64).cos()));
            nodes[0] = -1.0;
            nodes[n] = 1.0;
            nodes
        }
        NodeFamily::Cp2kZeros => {
            let np2 = (n + 2) as f64;
            ascending((1..=n + 1).map(|k| (k as f64 * PI / np2).cos()))
        }
        NodeFamily::Lg => legendre_gauss_nodes(n)?,
        NodeFamily::Lgl => legendre_gauss_lobatto_nodes(n)?,
    };
    let weights = quadrature_weights(family, n, &nodes)?;
    Ok(Grid { family, order: n, nodes, weights })
}

fn ascending<I: Iterator<Item = f64>>(descending: I) -> Vec<f64> {
    let mut v: Vec<f64> = descending.collect();
    v.reverse();
    // symmetric grids: clean the cos(pi/2) roundoff at the centre
    for t in v.iter_mut() {
        if t.abs() < 1e-15 {
            *t = 0.0;
        }
    }
    v
}

/// Roots of `P_{n+1}`.
fn legendre_gauss_nodes(n: usize) -> Result<Vec<f64>> {
    let m = n + 1;
    let mut nodes = Vec::with_capacity(m);
    for k in 0..m {
        // Chebyshev-Gauss roots of T_{n+1} are close to those of P_{n+1}
        let mut x = -((k as f64 + 0.5) * PI / m as f64).cos();
        let mut converged = false;
        let mut residual = f64::INFINITY;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, dp) = legendre_with_derivative(m, x);
            residual = p.abs();
            let dx = p / dp;
            x -= dx;
            if dx.abs() < NEWTON_TOLERANCE {
                converged = true;
                break;
            }
        }
        let (p, _) = legendre_with_derivative(m, x);
        if !converged && p.abs() > NEWTON_TOLERANCE {
            return Err(Error::NodeConvergence { index: k, residual });
        }
        nodes.push(x);
    }
    symmetrize(&mut nodes);
    Ok(nodes)
}

/// Roots of `P'_n` plus the endpoints.
fn legendre_gauss_lobatto_nodes(n: usize) -> Result<Vec<f64>> {
    let mut nodes = vec![0.0; n + 1];
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    let nf = n as f64;
    for (k, node) in nodes.iter_mut().enumerate().take(n).skip(1) {
        let mut x = -(k as f64 * PI / nf).cos();
        let mut converged = false;
        let mut residual = f64::INFINITY;
        for _ in 0..NEWTON_MAX_ITER {
            // Newton on (1 - x^2) P'_n(x), whose derivative is -n (n + 1) P_n(x)
            let (p, dp) = legendre_with_derivative(n, x);
            residual = dp.abs();
            let dx = (1.0 - x * x) * dp / (nf * (nf + 1.0) * p);
            x += dx;
            if dx.abs() < NEWTON_TOLERANCE {
                converged = true;
                break;
            }
        }
        if !converged {
            let (_, dp) = legendre_with_derivative(n, x);
            if dp.abs() * (1.0 - x * x) > 1e-12 {
                return Err(Error::NodeConvergence { index: k, residual });
            }
        }
        *node = x;
    }
    symmetrize(&mut nodes);
    Ok(nodes)
}

/// Enforce exact antisymmetry of a sorted symmetric node set.
fn symmetrize(nodes: &mut [f64]) {
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let len = nodes.len();
    for k in 0..len / 2 {
        let avg = 0.5 * (nodes[len - 1 - k] - nodes[k]);
        nodes[k] = -avg;
        nodes[len - 1 - k] = avg;
    }
    if len % 2 == 1 {
        nodes[len / 2] = 0.0;
    }
}

/// Quadrature weights for `nodes` produced by [`make_grid`] with the same
/// family and order. The result is checked for polynomial exactness.
pub fn quadrature_weights(family: NodeFamily, n: usize, nodes: &[f64]) -> Result<Vec<f64>> {
    if nodes.len() != n + 1 {
        return Err(Error::Layout { expected: n + 1, actual: nodes.len() });
    }
    let weights: Vec<f64> = match family {
        NodeFamily::Lg => nodes
            .iter()
            .map(|&t| {
                let (_, dp) = legendre_with_derivative(n + 1, t);
                2.0 / ((1.0 - t * t) * dp * dp)
            })
            .collect(),
        NodeFamily::Lgl => {
            let c = 2.0 / (n as f64 * (n as f64 + 1.0));
            nodes
                .iter()
                .map(|&t| {
                    let p = eval_single(PolyFamily::Legendre, n, t);
                    c / (p * p)
                })
                .collect()
        }
        NodeFamily::Cg => {
            // Fejér's first rule with N = n + 1 points
            let big_n = n + 1;
            nodes
                .iter()
                .map(|&t| {
                    let theta = t.clamp(-1.0, 1.0).acos();
                    let s: f64 = (1..=big_n / 2)
                        .map(|i| {
                            let i = i as f64;
                            (2.0 * i * theta).cos() / (4.0 * i * i - 1.0)
                        })
                        .sum();
                    2.0 / big_n as f64 * (1.0 - 2.0 * s)
                })
                .collect()
        }
        NodeFamily::Cgl => {
            // Clenshaw-Curtis; endpoints 1/(n^2 - 1) for even n, 1/n^2 for odd n
            let nf = n as f64;
            let end = if n % 2 == 0 { 1.0 / ((nf - 1.0) * (nf + 1.0)) } else { 1.0 / (nf * nf) };
            nodes
                .iter()
                .enumerate()
                .map(|(k, &t)| {
                    if k == 0 || k == n {
                        return end;
                    }
                    let theta = t.clamp(-1.0, 1.0).acos();
                    let s: f64 = (1..=n / 2)
                        .map(|i| {
                            let b = if 2 * i == n { 1.0 } else { 2.0 };
                            let i = i as f64;
                            b * (2.0 * i * theta).cos() / (4.0 * i * i - 1.0)
                        })
                        .sum();
                    2.0 / nf * (1.0 - s)
                })
                .collect()
        }
        NodeFamily::Cp2kZeros => {
            // Fejér's second rule with N = n + 2
            let big_n = n + 2;
            nodes
                .iter()
                .map(|&t| {
                    let theta = t.clamp(-1.0, 1.0).acos();
                    let s: f64 = (1..=big_n / 2)
                        .map(|i| {
                            let odd = (2 * i - 1) as f64;
                            (odd * theta).sin() / odd
                        })
                        .sum();
                    4.0 * theta.sin() / big_n as f64 * s
                })
                .collect()
        }
    };
    let (degree, error) = worst_exactness_error(nodes, &weights, family.exactness_degree(n));
    if error > EXACTNESS_TOLERANCE {
        return Err(Error::QuadratureExactness { degree, error });
    }
    Ok(weights)
}

/// Worst `|sum_k w_k tau_k^p - int_{-1}^{1} tau^p|` over `p = 0..=degree`.
pub fn worst_exactness_error(nodes: &[f64], weights: &[f64], degree: usize) -> (usize, f64) {
    let mut worst = (0, 0.0);
    let mut powers = vec![1.0; nodes.len()];
    for p in 0..=degree {
        let sum: f64 = powers.iter().zip(weights).map(|(x, w)| x * w).sum();
        let exact = if p % 2 == 0 { 2.0 / (p as f64 + 1.0) } else { 0.0 };
        let err = (sum - exact).abs();
        if err > worst.1 {
            worst = (p, err);
        }
        for (x, t) in powers.iter_mut().zip(nodes) {
            *x *= t;
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn small_grids() {
        let cg = make_grid(NodeFamily::Cg, 1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(cg.nodes[0], -h, epsilon = 1e-15);
        assert_abs_diff_eq!(cg.nodes[1], h, epsilon = 1e-15);

        let lg = make_grid(NodeFamily::Lg, 1).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert_abs_diff_eq!(lg.nodes[0], -r, epsilon = 1e-15);
        assert_abs_diff_eq!(lg.nodes[1], r, epsilon = 1e-15);

        let lgl = make_grid(NodeFamily::Lgl, 2).unwrap();
        assert_eq!(lgl.nodes, vec![-1.0, 0.0, 1.0]);
        for (w, e) in lgl.weights.iter().zip([1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]) {
            assert_abs_diff_eq!(*w, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn grid_invariants() {
        for family in NodeFamily::ALL {
            for n in [2usize, 3, 8, 13, 20, 40, 61] {
                let g = make_grid(family, n).unwrap();
                assert_eq!(g.len(), n + 1);
                assert!(g.nodes.windows(2).all(|w| w[0] < w[1]), "{family} n={n}");
                assert!(g.nodes.iter().all(|t| t.abs() <= 1.0));
                assert!(g.weights.iter().all(|&w| w > 0.0), "{family} n={n}");
                assert_abs_diff_eq!(g.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-12);
                if family.includes_endpoints() {
                    assert_eq!(g.nodes[0], -1.0);
                    assert_eq!(g.nodes[n], 1.0);
                } else {
                    assert!(g.nodes[0] > -1.0 && g.nodes[n] < 1.0);
                }
                for k in 0..=n {
                    assert_abs_diff_eq!(g.nodes[k], -g.nodes[n - k], epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn rejects_mismatched_node_count() {
        assert!(matches!(
            quadrature_weights(NodeFamily::Cg, 4, &[0.0, 0.5]),
            Err(Error::Layout { .. })
        ));
    }

    #[test]
    fn exactness_check_flags_wrong_weights() {
        let g = make_grid(NodeFamily::Cg, 6).unwrap();
        let mut w = g.weights.clone();
        w[2] += 1e-6;
        let (_, err) = worst_exactness_error(&g.nodes, &w, 6);
        assert!(err > 1e-7);
    }
}
