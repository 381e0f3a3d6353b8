use nalgebra::DMatrix;

use crate::poly::PolyFamily;

/// Coefficients of the adjacent-polynomial integral identities
/// `int phi_i = b_i^+ phi_{i+1} + b_i^- phi_{i-1} + C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationWeights {
    pub family: PolyFamily,
    pub b0_plus: f64,
    pub b1_plus: f64,
    pub b1_minus: f64,
}

impl IntegrationWeights {
    pub fn for_family(family: PolyFamily) -> Self {
        match family {
            PolyFamily::Cp1k => Self { family, b0_plus: 1.0, b1_plus: 0.25, b1_minus: 0.25 },
            PolyFamily::Cp2k => Self { family, b0_plus: 0.5, b1_plus: 0.25, b1_minus: 0.25 },
            PolyFamily::Legendre => {
                Self { family, b0_plus: 1.0, b1_plus: 1.0 / 3.0, b1_minus: -1.0 / 6.0 }
            }
        }
    }

    /// `b_i^+` for any `i >= 0`.
    pub fn plus(&self, i: usize) -> f64 {
        match i {
            0 => self.b0_plus,
            1 => self.b1_plus,
            _ => {
                let i = i as f64;
                match self.family {
                    PolyFamily::Cp1k | PolyFamily::Cp2k => 1.0 / (2.0 * (i + 1.0)),
                    PolyFamily::Legendre => 1.0 / (2.0 * i + 1.0),
                }
            }
        }
    }

    /// `b_i^-` for `i >= 1`; zero for `i = 0`.
    pub fn minus(&self, i: usize) -> f64 {
        match i {
            0 => 0.0,
            1 => self.b1_minus,
            _ => {
                let i = i as f64;
                match self.family {
                    PolyFamily::Cp1k => -1.0 / (2.0 * (i - 1.0)),
                    PolyFamily::Cp2k => -1.0 / (2.0 * (i + 1.0)),
                    PolyFamily::Legendre => -1.0 / (2.0 * i + 1.0),
                }
            }
        }
    }

    /// Integration matrix for a series of degree `cols - 1`: shape
    /// `(cols + 1) x cols`, `b_c^+` on the sub-diagonal and `b_c^-` on the
    /// super-diagonal of column `c`.
    ///
    /// The matrix for `n + j` columns is the `j`-th matrix of the chain; its
    /// leading block is the previous one.
    pub fn matrix(&self, cols: usize) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(cols + 1, cols);
        for c in 0..cols {
            b[(c + 1, c)] = self.plus(c);
            if c >= 1 {
                b[(c - 1, c)] = self.minus(c);
            }
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::eval_single;

    #[test]
    fn table_rows() {
        let t = IntegrationWeights::for_family(PolyFamily::Cp1k);
        assert_eq!((t.b0_plus, t.b1_plus, t.b1_minus), (1.0, 0.25, 0.25));
        assert_eq!(t.plus(4), 0.1);
        assert_eq!(t.minus(4), -1.0 / 6.0);
        let u = IntegrationWeights::for_family(PolyFamily::Cp2k);
        assert_eq!((u.b0_plus, u.b1_plus, u.b1_minus), (0.5, 0.25, 0.25));
        assert_eq!(u.plus(3), 0.125);
        assert_eq!(u.minus(3), -0.125);
        let p = IntegrationWeights::for_family(PolyFamily::Legendre);
        assert_eq!((p.b0_plus, p.b1_plus, p.b1_minus), (1.0, 1.0 / 3.0, -1.0 / 6.0));
        assert_eq!(p.plus(2), 0.2);
        assert_eq!(p.minus(2), -0.2);
    }

    /// The identities hold up to a constant: the derivative of
    /// `b^+ phi_{i+1} + b^- phi_{i-1}` must equal `phi_i`.
    #[test]
    fn identities_differentiate_back() {
        for family in PolyFamily::ALL {
            let w = IntegrationWeights::for_family(family);
            for i in 0..25usize {
                for &tau in &[-0.9, -0.31, 0.2, 0.77] {
                    let h = 1e-6;
                    let anti = |t: f64| {
                        let lower = if i >= 1 { w.minus(i) * eval_single(family, i - 1, t) } else { 0.0 };
                        w.plus(i) * eval_single(family, i + 1, t) + lower
                    };
                    let fd = (anti(tau + h) - anti(tau - h)) / (2.0 * h);
                    let exact = eval_single(family, i, tau);
                    assert!((fd - exact).abs() < 1e-6 * (1.0 + exact.abs()), "{family} i={i}");
                }
            }
        }
    }
}
