use nalgebra::DMatrix;
use rayon::prelude::*;

use super::problem::NlpProblem;

/// Problem functions at one point.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Point {
    pub x: Vec<f64>,
    pub f: f64,
    pub eq: Vec<f64>,
    pub ineq: Vec<f64>,
}

impl Point {
    pub fn is_finite(&self) -> bool {
        self.f.is_finite() && self.eq.iter().chain(&self.ineq).all(|v| v.is_finite())
    }

    pub fn max_eq(&self) -> f64 {
        self.eq.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_ineq(&self) -> f64 {
        self.ineq.iter().fold(0.0, |m, v| m.max(*v))
    }
}

pub(crate) fn evaluate<P: NlpProblem + ?Sized>(problem: &P, x: Vec<f64>) -> Point {
    let mut eq = vec![0.0; problem.num_equalities()];
    let mut ineq = vec![0.0; problem.num_inequalities()];
    let f = problem.evaluate(&x, &mut eq, &mut ineq);
    Point { x, f, eq, ineq }
}

/// Forward-difference first derivatives. Jacobians are stored transposed:
/// column `i` of `jeq` is the gradient of equality `i`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Derivatives {
    pub grad: Vec<f64>,
    pub jeq: DMatrix<f64>,
    pub jin: DMatrix<f64>,
}

/// Column `i` uses the step `h * max(1, |x_i|)`, flipped backwards when the
/// forward point would leave the upper bound. Columns run concurrently.
pub(crate) fn fd_derivatives<P: NlpProblem + ?Sized>(problem: &P, at: &Point, h: f64, upper: &[f64]) -> Derivatives {
    let n = at.x.len();
    let cols: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut step = h * at.x[i].abs().max(1.0);
            if at.x[i] + step > upper[i] {
                step = -step;
            }
            let mut x = at.x.clone();
            x[i] += step;
            // use the representable step
            let step = x[i] - at.x[i];
            let p = evaluate(problem, x);
            let inv = 1.0 / step;
            (
                (p.f - at.f) * inv,
                p.eq.iter().zip(&at.eq).map(|(a, b)| (a - b) * inv).collect(),
                p.ineq.iter().zip(&at.ineq).map(|(a, b)| (a - b) * inv).collect(),
            )
        })
        .collect();
    let mut grad = vec![0.0; n];
    let mut jeq = DMatrix::zeros(n, at.eq.len());
    let mut jin = DMatrix::zeros(n, at.ineq.len());
    for (i, (g, e, c)) in cols.into_iter().enumerate() {
        grad[i] = g;
        for (r, v) in e.into_iter().enumerate() {
            jeq[(i, r)] = v;
        }
        for (r, v) in c.into_iter().enumerate() {
            jin[(i, r)] = v;
        }
    }
    Derivatives { grad, jeq, jin }
}
