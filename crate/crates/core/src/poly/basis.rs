use nalgebra::DMatrix;

use super::PolyFamily;
use crate::error::{Error, Result};

/// Slack allowed outside `[-1, 1]` for endpoint roundoff.
pub const DOMAIN_TOLERANCE: f64 = 1e-12;

/// Polynomial values `phi_j(tau_k)`: one row per point, one column per degree.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix {
    pub family: PolyFamily,
    pub entries: DMatrix<f64>,
}

impl BasisMatrix {
    pub fn degree_max(&self) -> usize {
        self.entries.ncols() - 1
    }

    pub fn points(&self) -> usize {
        self.entries.nrows()
    }
}

pub(crate) fn check_domain(tau: f64) -> Result<()> {
    if !tau.is_finite() || tau.abs() > 1.0 + DOMAIN_TOLERANCE {
        return Err(Error::Domain { value: tau });
    }
    Ok(())
}

/// Fill `out[0..=degree_max]` with `phi_0(tau) .. phi_degree_max(tau)` by recurrence.
pub fn eval_row(family: PolyFamily, tau: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = family.first(tau);
    }
    for i in 1..out.len().saturating_sub(1) {
        out[i + 1] = family.next(i, tau, out[i], out[i - 1]);
    }
}

/// Evaluate degrees `0..=degree_max` of `family` at every point.
pub fn eval_basis(family: PolyFamily, degree_max: usize, points: &[f64]) -> Result<BasisMatrix> {
    let mut entries = DMatrix::zeros(points.len(), degree_max + 1);
    let mut row = vec![0.0; degree_max + 1];
    for (k, &tau) in points.iter().enumerate() {
        check_domain(tau)?;
        eval_row(family, tau, &mut row);
        for (j, v) in row.iter().enumerate() {
            entries[(k, j)] = *v;
        }
    }
    Ok(BasisMatrix { family, entries })
}

/// Single polynomial value `phi_degree(tau)`.
pub fn eval_single(family: PolyFamily, degree: usize, tau: f64) -> f64 {
    let mut row = vec![0.0; degree + 1];
    eval_row(family, tau, &mut row);
    row[degree]
}

/// Legendre `P_n(tau)` and `P'_n(tau)`. The derivative uses
/// `(1 - tau^2) P'_n = n (P_{n-1} - tau P_n)` in the interior and the closed
/// form `P'_n(+-1) = (+-1)^{n-1} n (n + 1) / 2` at the endpoints.
pub fn legendre_with_derivative(n: usize, tau: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0;
    let mut p = tau;
    for i in 1..n {
        let next = PolyFamily::Legendre.next(i, tau, p, p_prev);
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let one_minus = 1.0 - tau * tau;
    let dp = if one_minus.abs() < 1e-15 {
        let sign = if tau > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        sign * nf * (nf + 1.0) / 2.0
    } else {
        nf * (p_prev - tau * p) / one_minus
    };
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn documented_rows() {
        let t = eval_basis(PolyFamily::Cp1k, 3, &[0.5]).unwrap();
        for (a, b) in t.entries.row(0).iter().zip([1.0, 0.5, -0.5, -1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let p = eval_basis(PolyFamily::Legendre, 2, &[0.5]).unwrap();
        for (a, b) in p.entries.row(0).iter().zip([1.0, 0.5, -0.125]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let u = eval_basis(PolyFamily::Cp2k, 2, &[0.5]).unwrap();
        for (a, b) in u.entries.row(0).iter().zip([1.0, 1.0, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn out_of_domain_names_value() {
        let err = eval_basis(PolyFamily::Cp1k, 2, &[0.0, 1.5]).unwrap_err();
        assert_eq!(err, Error::Domain { value: 1.5 });
        assert!(eval_basis(PolyFamily::Cp1k, 2, &[1.0 + 1e-13]).is_ok());
    }

    #[test]
    fn endpoint_values() {
        // T_n(+-1) = (+-1)^n, U_n(+-1) = (+-1)^n (n+1), P_n(+-1) = (+-1)^n
        for n in 0..12usize {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(eval_single(PolyFamily::Cp1k, n, -1.0), s, epsilon = 1e-12);
            assert_abs_diff_eq!(eval_single(PolyFamily::Cp2k, n, -1.0), s * (n as f64 + 1.0), epsilon = 1e-12);
            assert_abs_diff_eq!(eval_single(PolyFamily::Legendre, n, -1.0), s, epsilon = 1e-12);
            assert_abs_diff_eq!(eval_single(PolyFamily::Legendre, n, 1.0), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn legendre_derivative_matches_finite_difference() {
        for n in 1..15 {
            for &tau in &[-1.0, -0.7, 0.0, 0.33, 1.0] {
                let (_, dp) = legendre_with_derivative(n, tau);
                let h = 1e-6;
                let lo = (tau - h).max(-1.0);
                let hi = (tau + h).min(1.0);
                let fd = (eval_single(PolyFamily::Legendre, n, hi)
                    - eval_single(PolyFamily::Legendre, n, lo))
                    / (hi - lo);
                assert!((dp - fd).abs() < 1e-3 * (1.0 + dp.abs()), "n={n} tau={tau}: {dp} vs {fd}");
            }
        }
    }
}
