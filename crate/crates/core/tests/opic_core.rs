use dopic::opic::{solve_linear_ivp, solve_nonlinear_ivp};
use dopic::{build_operator, make_grid, NodeFamily, OpicOperator, PolyFamily};
use proptest::prelude::*;

const FAMILIES: [NodeFamily; 5] =
    [NodeFamily::Cg, NodeFamily::Cgl, NodeFamily::Cp2kZeros, NodeFamily::Lg, NodeFamily::Lgl];

fn operator(nodes: NodeFamily, n: usize, q: usize) -> OpicOperator {
    let grid = make_grid(nodes, n).unwrap();
    build_operator(nodes.poly_family(), n, q, &grid).unwrap()
}

fn max_err(values: &[f64], nodes: &[f64], exact: impl Fn(f64) -> f64) -> f64 {
    values.iter().zip(nodes).map(|(v, &t)| (v - exact(t)).abs()).fold(0.0, f64::max)
}

#[test]
fn harmonic_oscillator_all_families() {
    // y'' = -y, y(-1) = 0, y'(-1) = 1  =>  y = sin(tau + 1)
    for nodes in FAMILIES {
        let op = operator(nodes, 25, 2);
        let sol = solve_linear_ivp(&op, 2, |d, _| if d == 0 { -1.0 } else { 0.0 }, |_| 0.0, &[1.0, 0.0]).unwrap();
        let e0 = max_err(sol.derivative(0), op.nodes(), |t| (t + 1.0).sin());
        let e1 = max_err(sol.derivative(1), op.nodes(), |t| (t + 1.0).cos());
        assert!(e0 < 1e-12 && e1 < 1e-12, "{nodes}: {e0:e} {e1:e}");
    }
}

#[test]
fn exponential_converges_spectrally() {
    for nodes in FAMILIES {
        let errs: Vec<f64> = [5usize, 10, 15, 20]
            .iter()
            .map(|&n| {
                let op = operator(nodes, n, 1);
                let sol = solve_linear_ivp(&op, 1, |_, _| 1.0, |_| 0.0, &[1.0]).unwrap();
                max_err(sol.derivative(0), op.nodes(), |t| (t + 1.0).exp())
            })
            .collect();
        assert!(errs[2] / errs[0] < 1e-6, "{nodes}: {errs:?}");
        for w in errs.windows(2) {
            assert!(w[1] < 0.1 * w[0] || w[1] < 1e-13, "{nodes}: {errs:?}");
        }
    }
}

#[test]
fn straight_line_is_exact_for_any_order() {
    for n in [2usize, 3, 7, 30] {
        for nodes in FAMILIES {
            let op = operator(nodes, n, 2);
            let sol = solve_linear_ivp(&op, 2, |_, _| 0.0, |_| 0.0, &[1.0, 0.0]).unwrap();
            assert!(max_err(sol.derivative(0), op.nodes(), |t| t + 1.0) < 1e-14);
        }
    }
}

#[test]
fn families_agree_on_common_points() {
    // y'' = -y - 0.3 y' + cos(2 tau)
    let points: Vec<f64> = (0..=20).map(|i| -1.0 + 0.1 * i as f64).collect();
    let mut results = Vec::new();
    for nodes in [NodeFamily::Cg, NodeFamily::Cp2kZeros, NodeFamily::Lg] {
        let op = operator(nodes, 24, 2);
        let sol = solve_linear_ivp(
            &op,
            2,
            |d, _| if d == 0 { -1.0 } else { -0.3 },
            |t| (2.0 * t).cos(),
            &[0.5, 0.2],
        )
        .unwrap();
        results.push(op.reconstruct_dense(&sol.alpha, &sol.init_conds, 2, &points).unwrap());
    }
    for other in &results[1..] {
        let diff = other.iter().zip(&results[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff:e}");
    }
}

#[test]
fn nonlinear_matches_linear_when_linear() {
    let op = operator(NodeFamily::Lgl, 20, 2);
    let lin = solve_linear_ivp(&op, 2, |d, _| if d == 0 { -4.0 } else { 0.0 }, |_| 0.0, &[0.0, 1.0]).unwrap();
    let nl = solve_nonlinear_ivp(&op, 2, |_, s| -4.0 * s[0], &[0.0, 1.0]).unwrap();
    for (a, b) in lin.derivative(0).iter().zip(nl.derivative(0)) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn product_shape_law() {
    for nodes in FAMILIES {
        for q in 1..=4 {
            let op = operator(nodes, 10, q);
            for m in 1..=q {
                let p = op.product_matrix(m);
                assert_eq!((p.nrows(), p.ncols()), (10 + m + 1, 11));
            }
        }
    }
}

#[test]
fn lower_bounds_recomputed_from_scratch() {
    for nodes in FAMILIES {
        let op = operator(nodes, 12, 3);
        let family = nodes.poly_family();
        for j in 1..=3 {
            let mut phi = vec![0.0; 12 + j + 1];
            for (d, p) in phi.iter_mut().enumerate() {
                *p = dopic::poly::eval_single(family, d, -1.0);
            }
            // multiply through B_j ... B_1 one factor at a time
            let mut row = phi;
            for h in (1..=j).rev() {
                let b = op.integration_matrix(h);
                row = (0..b.ncols()).map(|c| (0..b.nrows()).map(|r| row[r] * b[(r, c)]).sum()).collect();
            }
            let v = op.lower_bound(j);
            for (a, b) in row.iter().zip(v.iter()) {
                assert!((a - b).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn levels_are_antiderivatives() {
    // differentiate the dense level-m polynomial and compare with level m-1
    let op = operator(NodeFamily::Cgl, 15, 3);
    let alpha: Vec<f64> = (0..16).map(|i| 1.0 / (1.0 + i as f64).powi(2)).collect();
    let init = [0.3, -0.2, 0.7];
    let pts: Vec<f64> = (1..40).map(|i| -1.0 + 0.05 * i as f64).collect();
    let h = 1e-6;
    for m in 1..=3 {
        let plus: Vec<f64> = pts.iter().map(|t| t + h).collect();
        let minus: Vec<f64> = pts.iter().map(|t| t - h).collect();
        let up = op.reconstruct_dense(&alpha, &init, m, &plus).unwrap();
        let dn = op.reconstruct_dense(&alpha, &init, m, &minus).unwrap();
        let lower = op.reconstruct_dense(&alpha, &init, m - 1, &pts).unwrap();
        for i in 0..pts.len() {
            assert!(((up[i] - dn[i]) / (2.0 * h) - lower[i]).abs() < 1e-4);
        }
    }
}

#[test]
fn endpoints_match_dense_reconstruction() {
    for nodes in FAMILIES {
        let op = operator(nodes, 9, 2);
        let alpha: Vec<f64> = (0..10).map(|i| (i as f64 * 0.7).sin()).collect();
        let init = [0.4, -1.1];
        for m in 0..=2 {
            let dense = op.reconstruct_dense(&alpha, &init, m, &[-1.0, 1.0]).unwrap();
            assert!((op.apply_endpoint(m, false, &alpha, &init) - dense[0]).abs() < 1e-13);
            assert!((op.apply_endpoint(m, true, &alpha, &init) - dense[1]).abs() < 1e-13);
        }
        // lower endpoints reproduce the initial conditions
        assert!((op.apply_endpoint(1, false, &alpha, &init) - init[0]).abs() < 1e-13);
        assert!((op.apply_endpoint(2, false, &alpha, &init) - init[1]).abs() < 1e-13);
    }
}

proptest! {
    #[test]
    fn polynomial_levels_exact(coeffs in proptest::collection::vec(-2.0f64..2.0, 4), y1 in -1.0f64..1.0, y0 in -1.0f64..1.0) {
        // y'' = cubic; integrate twice by hand
        let poly = |t: f64| coeffs[0] + coeffs[1] * t + coeffs[2] * t * t + coeffs[3] * t * t * t;
        let anti = |t: f64| coeffs[0] * t + coeffs[1] * t * t / 2.0 + coeffs[2] * t.powi(3) / 3.0 + coeffs[3] * t.powi(4) / 4.0;
        let anti2 = |t: f64| coeffs[0] * t * t / 2.0 + coeffs[1] * t.powi(3) / 6.0 + coeffs[2] * t.powi(4) / 12.0 + coeffs[3] * t.powi(5) / 20.0;
        let dy = |t: f64| y1 + anti(t) - anti(-1.0);
        let y = |t: f64| y0 + y1 * (t + 1.0) + anti2(t) - anti2(-1.0) - anti(-1.0) * (t + 1.0);
        for nodes in FAMILIES {
            let op = operator(nodes, 6, 2);
            let sol = solve_linear_ivp(&op, 2, |_, _| 0.0, poly, &[y1, y0]).unwrap();
            prop_assert!(max_err(sol.derivative(1), op.nodes(), dy) < 1e-12);
            prop_assert!(max_err(sol.derivative(0), op.nodes(), y) < 1e-12);
        }
    }
}

#[test]
fn family_pairing_enforced() {
    let grid = make_grid(NodeFamily::Lg, 6).unwrap();
    assert!(build_operator(PolyFamily::Cp1k, 6, 2, &grid).is_err());
    assert!(build_operator(PolyFamily::Legendre, 5, 2, &grid).is_err());
}
