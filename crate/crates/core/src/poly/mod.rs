//! Chebyshev (first and second kind) and Legendre polynomials, their node
//! grids and quadrature weights.

mod basis;
mod family;
mod grid;
mod orthogonality;

pub use basis::{eval_basis, eval_row, eval_single, legendre_with_derivative, BasisMatrix, DOMAIN_TOLERANCE};
pub(crate) use basis::check_domain;
pub use family::{BasisSpec, NodeFamily, PolyFamily};
pub use grid::{make_grid, quadrature_weights, worst_exactness_error, Grid};
pub use orthogonality::{discrete_gram, discrete_orthogonality_check};
