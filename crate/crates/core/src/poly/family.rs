use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Orthogonal polynomial family used to expand the highest derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolyFamily {
    /// Chebyshev polynomials of the first kind, `T_n`.
    #[serde(rename = "cp1k")]
    Cp1k,
    /// Chebyshev polynomials of the second kind, `U_n`.
    #[serde(rename = "cp2k")]
    Cp2k,
    /// Legendre polynomials, `P_n`.
    #[serde(rename = "legendre")]
    Legendre,
}

impl PolyFamily {
    pub const ALL: [PolyFamily; 3] = [PolyFamily::Cp1k, PolyFamily::Cp2k, PolyFamily::Legendre];

    /// Value of `phi_1(tau)`; `phi_0` is one for every family.
    pub(crate) fn first(self, tau: f64) -> f64 {
        match self {
            PolyFamily::Cp1k | PolyFamily::Legendre => tau,
            PolyFamily::Cp2k => 2.0 * tau,
        }
    }

    /// Three-term recurrence: `phi_{i+1}` from `phi_i` and `phi_{i-1}`.
    #[inline]
    pub fn next(self, i: usize, tau: f64, phi_i: f64, phi_im1: f64) -> f64 {
        match self {
            PolyFamily::Cp1k | PolyFamily::Cp2k => 2.0 * tau * phi_i - phi_im1,
            PolyFamily::Legendre => {
                let i = i as f64;
                ((2.0 * i + 1.0) * tau * phi_i - i * phi_im1) / (i + 1.0)
            }
        }
    }

    /// Node families that pair with this polynomial family.
    pub fn node_families(self) -> &'static [NodeFamily] {
        match self {
            PolyFamily::Cp1k => &[NodeFamily::Cg, NodeFamily::Cgl],
            PolyFamily::Cp2k => &[NodeFamily::Cp2kZeros],
            PolyFamily::Legendre => &[NodeFamily::Lg, NodeFamily::Lgl],
        }
    }
}

impl fmt::Display for PolyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolyFamily::Cp1k => "cp1k",
            PolyFamily::Cp2k => "cp2k",
            PolyFamily::Legendre => "legendre",
        })
    }
}

impl FromStr for PolyFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cp1k" | "chebyshev1" => Ok(PolyFamily::Cp1k),
            "cp2k" | "chebyshev2" => Ok(PolyFamily::Cp2k),
            "legendre" => Ok(PolyFamily::Legendre),
            other => Err(Error::InvalidArgument(format!("unknown polynomial family `{other}`"))),
        }
    }
}

/// Interpolation grid family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeFamily {
    /// Chebyshev-Gauss: roots of `T_{n+1}`.
    #[serde(rename = "cg")]
    Cg,
    /// Chebyshev-Gauss-Lobatto: extrema of `T_n` including the endpoints.
    #[serde(rename = "cgl")]
    Cgl,
    /// Roots of `U_{n+1}`.
    #[serde(rename = "cp2k")]
    Cp2kZeros,
    /// Legendre-Gauss: roots of `P_{n+1}`.
    #[serde(rename = "lg")]
    Lg,
    /// Legendre-Gauss-Lobatto: roots of `P'_n` plus the endpoints.
    #[serde(rename = "lgl")]
    Lgl,
}

impl NodeFamily {
    pub const ALL: [NodeFamily; 5] = [
        NodeFamily::Cg,
        NodeFamily::Cgl,
        NodeFamily::Cp2kZeros,
        NodeFamily::Lg,
        NodeFamily::Lgl,
    ];

    /// The polynomial family each grid is paired with.
    pub fn poly_family(self) -> PolyFamily {
        match self {
            NodeFamily::Cg | NodeFamily::Cgl => PolyFamily::Cp1k,
            NodeFamily::Cp2kZeros => PolyFamily::Cp2k,
            NodeFamily::Lg | NodeFamily::Lgl => PolyFamily::Legendre,
        }
    }

    /// Whether the grid contains both endpoints `-1` and `+1`.
    pub fn includes_endpoints(self) -> bool {
        matches!(self, NodeFamily::Cgl | NodeFamily::Lgl)
    }

    /// Highest monomial degree the attached quadrature integrates exactly.
    pub fn exactness_degree(self, n: usize) -> usize {
        match self {
            NodeFamily::Lg => 2 * n + 1,
            NodeFamily::Lgl => 2 * n - 1,
            NodeFamily::Cg | NodeFamily::Cgl | NodeFamily::Cp2kZeros => n,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NodeFamily::Cg => "CG",
            NodeFamily::Cgl => "CGL",
            NodeFamily::Cp2kZeros => "CP2K",
            NodeFamily::Lg => "LG",
            NodeFamily::Lgl => "LGL",
        }
    }
}

impl fmt::Display for NodeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeFamily::Cg => "cg",
            NodeFamily::Cgl => "cgl",
            NodeFamily::Cp2kZeros => "cp2k",
            NodeFamily::Lg => "lg",
            NodeFamily::Lgl => "lgl",
        })
    }
}

impl FromStr for NodeFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cg" => Ok(NodeFamily::Cg),
            "cgl" => Ok(NodeFamily::Cgl),
            "cp2k" | "cp2k_zeros" | "cp2k-zeros" => Ok(NodeFamily::Cp2kZeros),
            "lg" => Ok(NodeFamily::Lg),
            "lgl" => Ok(NodeFamily::Lgl),
            other => Err(Error::InvalidArgument(format!("unknown node family `{other}`"))),
        }
    }
}

/// A polynomial family together with the grid it is collocated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisSpec {
    pub family: PolyFamily,
    pub nodes: NodeFamily,
    pub order: usize,
}

impl BasisSpec {
    /// Basis spec with the polynomial family implied by the grid.
    pub fn for_grid(nodes: NodeFamily, order: usize) -> Self {
        Self { family: nodes.poly_family(), nodes, order }
    }

    pub fn new(family: PolyFamily, nodes: NodeFamily, order: usize) -> Result<Self, Error> {
        if nodes.poly_family() != family {
            return Err(Error::Configuration(format!(
                "{} nodes cannot be paired with {family} polynomials",
                nodes.label()
            )));
        }
        Ok(Self { family, nodes, order })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairings_are_total_and_consistent() {
        for nf in NodeFamily::ALL {
            assert!(nf.poly_family().node_families().contains(&nf));
        }
        assert!(BasisSpec::new(PolyFamily::Cp2k, NodeFamily::Cg, 10).is_err());
        assert!(BasisSpec::new(PolyFamily::Legendre, NodeFamily::Lgl, 10).is_ok());
    }

    #[test]
    fn names_round_trip() {
        for nf in NodeFamily::ALL {
            assert_eq!(nf.to_string().parse::<NodeFamily>().unwrap(), nf);
        }
        for pf in PolyFamily::ALL {
            assert_eq!(pf.to_string().parse::<PolyFamily>().unwrap(), pf);
        }
        assert!("gauss".parse::<NodeFamily>().is_err());
    }
}
