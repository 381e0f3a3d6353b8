//! SQP with damped BFGS, Goldfarb-Idnani subproblems, a Gauss-Newton
//! restoration step for inconsistent linearizations, second-order correction
//! and an l1 merit line search.
//!
//! The interior-point mode runs the same iteration on a sequence of
//! log-barrier problems over the variable bounds.

use std::io::Write;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use super::fd::{evaluate, fd_derivatives, Derivatives, Point};
use super::options::{SolveReport, SolveStatus, SolverOptions, TraceRecord};
use super::problem::NlpProblem;
use super::qp::{solve_qp, BoundRow, QpData, QpError, QpSolution};
use crate::error::{Error, Result};

const ARMIJO: f64 = 1e-4;
const MIN_ALPHA: f64 = 1e-10;
const STAGNATION: f64 = 1e-12;
const MIN_SCALE: f64 = 1e-8;
const RESTORATION_REG: f64 = 1e-8;
/// Equality rows whose gradient norm falls below this are treated as
/// structurally constant and left out of the subproblem.
const ZERO_ROW: f64 = 1e-14;

pub(crate) fn project(x0: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    x0.iter().zip(lower.iter().zip(upper)).map(|(&x, (&l, &u))| x.max(l).min(u)).collect()
}

/// Damped BFGS update (Powell): keeps `h` positive definite.
pub(crate) fn bfgs_update(h: &mut DMatrix<f64>, s: &DVector<f64>, y: &DVector<f64>) -> bool {
    let hs = &*h * s;
    let shs = s.dot(&hs);
    if !(shs > 0.0) || !shs.is_finite() {
        return false;
    }
    let sy = s.dot(y);
    let y = if sy < 0.2 * shs {
        let theta = 0.8 * shs / (shs - sy);
        y * theta + &hs * (1.0 - theta)
    } else {
        y.clone()
    };
    let sy = s.dot(&y);
    if !(sy > 0.0) || !sy.is_finite() {
        return false;
    }
    h.ger(1.0 / sy, &y, &y, 1.0);
    h.ger(-1.0 / shs, &hs, &hs, 1.0);
    true
}

pub(crate) fn write_trace(sink: &mut Option<&mut dyn Write>, rec: &TraceRecord) {
    if let Some(w) = sink.as_mut() {
        if let Ok(line) = serde_json::to_string(rec) {
            let _ = writeln!(w, "{line}");
        }
    }
}

pub(crate) fn non_finite(x: &[f64]) -> Error {
    Error::NonFiniteIterate { chi: x.to_vec() }
}

struct Subproblem {
    eq_rows: Vec<usize>,
    eq: DMatrix<f64>,
    ineq: DMatrix<f64>,
    bounds: Vec<BoundRow>,
}

/// `(equality multipliers, inequality multipliers, bound multipliers)` in
/// `grad f = J_eq lambda - J_in mu + sum bound terms` form.
#[derive(Clone)]
struct Multipliers {
    eq: Vec<f64>,
    ineq: Vec<f64>,
    bounds: Vec<(usize, f64)>,
}

impl Multipliers {
    fn lagrangian_grad(&self, der: &Derivatives) -> DVector<f64> {
        let mut g = DVector::from_column_slice(&der.grad);
        g -= &der.jeq * DVector::from_column_slice(&self.eq);
        g += &der.jin * DVector::from_column_slice(&self.ineq);
        g
    }

    fn stationarity(&self, der: &Derivatives, barrier_grad: &[f64]) -> f64 {
        let mut g = self.lagrangian_grad(der);
        for (g, b) in g.iter_mut().zip(barrier_grad) {
            *g += b;
        }
        for &(var, m) in &self.bounds {
            g[var] -= m;
        }
        g.amax()
    }
}

/// Bound rows keep `frac` of the current gap (1 for plain SQP).
fn subproblem(x: &[f64], p: &Point, der: &Derivatives, lower: &[f64], upper: &[f64], frac: f64) -> Subproblem {
    let n = x.len();
    let eq_rows: Vec<usize> = (0..p.eq.len()).filter(|&i| der.jeq.column(i).amax() > ZERO_ROW).collect();
    let mut eq = DMatrix::zeros(n, eq_rows.len());
    for (c, &i) in eq_rows.iter().enumerate() {
        eq.set_column(c, &der.jeq.column(i));
    }
    let ineq = -&der.jin;
    let mut bounds = Vec::new();
    for i in 0..n {
        if lower[i].is_finite() {
            bounds.push(BoundRow { var: i, sign: 1.0, rhs: frac * (x[i] - lower[i]) });
        }
        if upper[i].is_finite() {
            bounds.push(BoundRow { var: i, sign: -1.0, rhs: frac * (upper[i] - x[i]) });
        }
    }
    Subproblem { eq_rows, eq, ineq, bounds }
}

struct Step {
    d: Vec<f64>,
    mult: Multipliers,
}

fn unpack(sol: QpSolution, sub: &Subproblem, p: &Point) -> Multipliers {
    let mut eq = vec![0.0; p.eq.len()];
    for (c, &i) in sub.eq_rows.iter().enumerate() {
        eq[i] = sol.eq_mult[c];
    }
    let bounds = sub.bounds.iter().zip(&sol.bound_mult).map(|(b, m)| (b.var, b.sign * m)).collect();
    Multipliers { eq, ineq: sol.ineq_mult, bounds }
}

/// Solve the QP with constraint values `ceq`, `cin`.
fn qp_step(h: &DMatrix<f64>, grad: &[f64], sub: &Subproblem, ceq: &[f64], cin: &[f64], p: &Point) -> std::result::Result<Step, QpError> {
    let eq_rhs: Vec<f64> = sub.eq_rows.iter().map(|&i| ceq[i]).collect();
    let ineq_rhs: Vec<f64> = cin.iter().map(|v| -v).collect();
    let data = QpData { h, g: grad, eq: &sub.eq, eq_rhs: &eq_rhs, ineq: &sub.ineq, ineq_rhs: &ineq_rhs, bounds: &sub.bounds };
    let sol = solve_qp(&data)?;
    let d = sol.d.clone();
    Ok(Step { d, mult: unpack(sol, sub, p) })
}

/// Gauss-Newton step on `1/2 |c_eq|^2 + 1/2 |max(c_in, 0)|^2` that keeps the
/// bounds and the currently satisfied linearized inequalities.
fn restoration_step(sub: &Subproblem, der: &Derivatives, p: &Point) -> std::result::Result<(Vec<f64>, f64), QpError> {
    let n = p.x.len();
    let violated: Vec<usize> = (0..p.ineq.len()).filter(|&i| p.ineq[i] > 0.0).collect();
    let satisfied: Vec<usize> = (0..p.ineq.len()).filter(|&i| p.ineq[i] <= 0.0).collect();
    let mut a = DMatrix::zeros(n, sub.eq_rows.len() + violated.len());
    let mut c = Vec::with_capacity(a.ncols());
    for (k, &i) in sub.eq_rows.iter().enumerate() {
        a.set_column(k, &der.jeq.column(i));
        c.push(p.eq[i]);
    }
    for (k, &i) in violated.iter().enumerate() {
        a.set_column(sub.eq_rows.len() + k, &der.jin.column(i));
        c.push(p.ineq[i]);
    }
    let mut h = &a * a.transpose();
    let reg = RESTORATION_REG * h.diagonal().amax().max(1.0);
    for i in 0..n {
        h[(i, i)] += reg;
    }
    let g: Vec<f64> = (&a * DVector::from_vec(c)).iter().copied().collect();
    let mut ineq = DMatrix::zeros(n, satisfied.len());
    for (k, &i) in satisfied.iter().enumerate() {
        ineq.set_column(k, &(-der.jin.column(i)));
    }
    let ineq_rhs: Vec<f64> = satisfied.iter().map(|&i| -p.ineq[i]).collect();
    let none = DMatrix::zeros(n, 0);
    let data = QpData { h: &h, g: &g, eq: &none, eq_rhs: &[], ineq: &ineq, ineq_rhs: &ineq_rhs, bounds: &sub.bounds };
    let sol = solve_qp(&data)?;
    let slope = sol.d.iter().zip(&g).map(|(d, g)| d * g).sum();
    Ok((sol.d, slope))
}

/// `1/2 |c_eq|^2 + 1/2 |max(c_in, 0)|^2` over the rows the subproblem keeps.
fn sq_violation(p: &Point, eq_rows: &[usize]) -> f64 {
    0.5 * eq_rows.iter().map(|&i| p.eq[i] * p.eq[i]).sum::<f64>()
        + 0.5 * p.ineq.iter().map(|c| c.max(0.0).powi(2)).sum::<f64>()
}

fn violation(p: &Point, w_eq: &[f64], w_in: &[f64]) -> f64 {
    p.eq.iter().zip(w_eq).map(|(c, w)| w * c.abs()).sum::<f64>()
        + p.ineq.iter().zip(w_in).map(|(c, w)| w * c.max(0.0)).sum::<f64>()
}


/// `-mu sum ln(gap)` over the finite variable bounds.
struct Barrier<'a> {
    mu: f64,
    lower: &'a [f64],
    upper: &'a [f64],
}

impl Barrier<'_> {
    fn gaps<'b>(&'b self, x: &'b [f64]) -> impl Iterator<Item = (usize, f64, f64)> + 'b {
        (0..x.len()).flat_map(move |i| {
            let lo = self.lower[i].is_finite().then(|| (i, x[i] - self.lower[i], 1.0));
            let up = self.upper[i].is_finite().then(|| (i, self.upper[i] - x[i], -1.0));
            lo.into_iter().chain(up)
        })
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.gaps(x).map(|(_, g, _)| if g > 0.0 { -self.mu * g.ln() } else { f64::INFINITY }).sum()
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for (i, g, sign) in self.gaps(x) {
            out[i] -= sign * self.mu / g;
        }
        out
    }

    fn add_hessian(&self, x: &[f64], h: &mut DMatrix<f64>) {
        for (i, g, _) in self.gaps(x) {
            h[(i, i)] += self.mu / (g * g);
        }
    }
}

const FRACTION_TO_BOUNDARY: f64 = 0.99;
const MU_START: f64 = 1e-1;
const MU_END: f64 = 1e-8;
const MU_FACTOR: f64 = 0.1;
/// Intermediate barrier stages stop at `max(tol, STAGE_TOL * mu)`.
const STAGE_TOL: f64 = 10.0;
/// Relative push of the starting point away from the bounds.
const BOUND_PUSH: f64 = 1e-2;

struct State {
    p: Point,
    der: Derivatives,
    h: DMatrix<f64>,
    fresh_hessian: bool,
    w_eq: Vec<f64>,
    w_in: Vec<f64>,
    mult: Multipliers,
    iterations: usize,
}

fn scale_of(x: &[f64]) -> f64 {
    x.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

impl State {
    fn new<P: NlpProblem + ?Sized>(problem: &P, x: Vec<f64>, opts: &SolverOptions, upper: &[f64]) -> Result<Self> {
        let n = x.len();
        let p = evaluate(problem, x);
        if !p.is_finite() {
            return Err(non_finite(&p.x));
        }
        let der = fd_derivatives(problem, &p, opts.finite_difference_step, upper);
        let (me, mi) = (p.eq.len(), p.ineq.len());
        Ok(Self {
            p,
            der,
            h: DMatrix::identity(n, n),
            fresh_hessian: true,
            w_eq: vec![0.0; me],
            w_in: vec![0.0; mi],
            mult: Multipliers { eq: vec![0.0; me], ineq: vec![0.0; mi], bounds: Vec::new() },
            iterations: 0,
        })
    }

    fn feasible(&self, ctol: f64) -> bool {
        self.p.max_eq() <= ctol && self.p.max_ineq() <= ctol
    }

    fn report(self, status: SolveStatus, opts: &SolverOptions, start: Instant) -> Result<SolveReport> {
        if !self.p.is_finite() {
            return Err(non_finite(&self.p.x));
        }
        let converged = matches!(status, SolveStatus::Converged | SolveStatus::Stagnated) && self.feasible(opts.constraint_tolerance);
        Ok(SolveReport {
            converged,
            status,
            iterations: self.iterations,
            objective: self.p.f,
            max_eq_violation: self.p.max_eq(),
            max_ineq_violation: self.p.max_ineq(),
            chi: self.p.x,
            wall_time: start.elapsed().as_secs_f64(),
        })
    }
}

/// Iterate until `ctol`-feasible and `tol`-stationary or out of iterations. Without a barrier the
/// bound rows are the exact bounds.
fn iterate<P: NlpProblem + ?Sized>(
    problem: &P,
    st: &mut State,
    opts: &SolverOptions,
    trace: &mut Option<&mut dyn Write>,
    barrier: Option<&Barrier>,
    tol: f64,
    ctol: f64,
) -> SolveStatus {
    let n = st.p.x.len();
    let lower = problem.lower_bounds();
    let upper = problem.upper_bounds();
    let frac = if barrier.is_some() { FRACTION_TO_BOUNDARY } else { 1.0 };
    let bvalue = |x: &[f64]| barrier.map_or(0.0, |b| b.value(x));
    let bgrad = |x: &[f64]| barrier.map_or_else(Vec::new, |b| b.grad(x));

    while st.iterations < opts.max_iterations {
        st.iterations += 1;
        let State { p, der, h, fresh_hessian, w_eq, w_in, mult, .. } = st;
        let sub = subproblem(&p.x, p, der, &lower, &upper, frac);
        let trial = |alpha: f64, dir: &DVector<f64>| -> Point {
            let x: Vec<f64> = p.x.iter().zip(dir.iter()).map(|(x, d)| x + alpha * d).collect();
            evaluate(problem, project(&x, &lower, &upper))
        };
        let mut grad = der.grad.clone();
        for (g, b) in grad.iter_mut().zip(bgrad(&p.x)) {
            *g += b;
        }
        let hq = match barrier {
            Some(b) => {
                let mut m = h.clone();
                b.add_hessian(&p.x, &mut m);
                std::borrow::Cow::Owned(m)
            }
            None => std::borrow::Cow::Borrowed(&*h),
        };

        let (next, alpha) = match qp_step(&hq, &grad, &sub, &p.eq, &p.ineq, p) {
            Ok(step) => {
                for (w, m) in w_eq.iter_mut().zip(&step.mult.eq) {
                    *w = m.abs().max(0.5 * (*w + m.abs()));
                }
                for (w, m) in w_in.iter_mut().zip(&step.mult.ineq) {
                    *w = m.abs().max(0.5 * (*w + m.abs()));
                }
                let d = DVector::from_column_slice(&step.d);
                let merit = |q: &Point| q.f + bvalue(&q.x) + violation(q, w_eq, w_in);
                let viol0 = violation(p, w_eq, w_in);
                let merit0 = merit(p);
                let slope = d.dot(&DVector::from_column_slice(&grad)) - viol0;
                let accept = |q: &Point, alpha: f64| -> bool {
                    q.is_finite() && merit(q) <= merit0 + ARMIJO * alpha * slope.min(0.0)
                };
                let mut alpha = 1.0;
                let mut next = trial(1.0, &d);
                let mut accepted = accept(&next, 1.0);
                if !accepted && next.is_finite() {
                    // second-order correction with constraint values shifted to x + d
                    let jd_eq = der.jeq.tr_mul(&d);
                    let jd_in = der.jin.tr_mul(&d);
                    let ceq: Vec<f64> = next.eq.iter().zip(jd_eq.iter()).map(|(c, j)| c - j).collect();
                    let cin: Vec<f64> = next.ineq.iter().zip(jd_in.iter()).map(|(c, j)| c - j).collect();
                    if let Ok(soc) = qp_step(&hq, &grad, &sub, &ceq, &cin, p) {
                        let q = trial(1.0, &DVector::from_column_slice(&soc.d));
                        if accept(&q, 1.0) {
                            next = q;
                            accepted = true;
                        }
                    }
                }
                while !accepted {
                    let mt = if next.is_finite() { merit(&next) } else { f64::INFINITY };
                    let denom = 2.0 * (mt - merit0 - slope * alpha);
                    let interp = if denom > 0.0 && mt.is_finite() { -slope * alpha * alpha / denom } else { 0.1 * alpha };
                    alpha = interp.clamp(0.1 * alpha, 0.5 * alpha);
                    if alpha < MIN_ALPHA {
                        break;
                    }
                    next = trial(alpha, &d);
                    accepted = accept(&next, alpha);
                }
                if !accepted {
                    let feasible = p.max_eq() <= ctol && p.max_ineq() <= ctol;
                    if feasible && d.amax() <= STAGNATION * scale_of(&p.x) {
                        return SolveStatus::Stagnated;
                    }
                    if !*fresh_hessian {
                        *h = DMatrix::identity(n, n);
                        *fresh_hessian = true;
                        continue;
                    }
                    return SolveStatus::LineSearchFailure;
                }
                *mult = step.mult;
                (next, alpha)
            }
            Err(QpError::NotConvex) if !*fresh_hessian => {
                *h = DMatrix::identity(n, n);
                *fresh_hessian = true;
                continue;
            }
            Err(_) => {
                // inconsistent linearization: reduce the violation instead
                let Ok((d, slope)) = restoration_step(&sub, der, p) else {
                    return SolveStatus::SubproblemFailure;
                };
                let d = DVector::from_vec(d);
                let v0 = sq_violation(p, &sub.eq_rows);
                let mut alpha = 1.0;
                let mut accepted = None;
                while alpha >= MIN_ALPHA {
                    let q = trial(alpha, &d);
                    if q.is_finite() && bvalue(&q.x).is_finite() && sq_violation(&q, &sub.eq_rows) <= v0 + ARMIJO * alpha * slope.min(0.0) {
                        accepted = Some(q);
                        break;
                    }
                    alpha *= 0.5;
                }
                let Some(next) = accepted else {
                    return SolveStatus::SubproblemFailure;
                };
                (next, alpha)
            }
        };

        let s = DVector::from_iterator(n, next.x.iter().zip(&p.x).map(|(a, b)| a - b));
        let new_der = fd_derivatives(problem, &next, opts.finite_difference_step, &upper);
        let y = mult.lagrangian_grad(&new_der) - mult.lagrangian_grad(der);
        if *fresh_hessian {
            // initial scaling; the curvature magnitude |y|/|s| stands in when
            // s'y is not positive (e.g. nearly linear problems)
            let sy = s.dot(&y);
            let scale = if sy > 0.0 { y.norm_squared() / sy } else { y.norm() / s.norm() };
            if scale.is_finite() && scale > 0.0 {
                *h = DMatrix::identity(n, n) * scale.max(MIN_SCALE);
            }
        }
        if bfgs_update(h, &s, &y) {
            *fresh_hessian = false;
        }
        *p = next;
        *der = new_der;
        let stat = mult.stationarity(der, &bgrad(&p.x));
        let gscale = scale_of(&der.grad);
        let moved = s.amax();
        write_trace(
            trace,
            &TraceRecord {
                iteration: st.iterations,
                objective: st.p.f,
                feasibility: st.p.max_eq().max(st.p.max_ineq()),
                stationarity: stat,
                step: moved,
                alpha,
                merit: st.p.f + bvalue(&st.p.x) + violation(&st.p, &st.w_eq, &st.w_in),
                mu: barrier.map(|b| b.mu),
            },
        );
        if st.feasible(ctol) {
            if stat <= tol * gscale {
                return SolveStatus::Converged;
            }
            if moved <= STAGNATION * scale_of(&st.p.x) {
                return SolveStatus::Stagnated;
            }
        }
    }
    SolveStatus::IterationLimit
}

pub(crate) fn solve_sqp<P: NlpProblem + ?Sized>(
    problem: &P,
    x0: &[f64],
    opts: &SolverOptions,
    mut trace: Option<&mut dyn Write>,
) -> Result<SolveReport> {
    let start = Instant::now();
    let x = project(x0, &problem.lower_bounds(), &problem.upper_bounds());
    let mut st = State::new(problem, x, opts, &problem.upper_bounds())?;
    let status = iterate(problem, &mut st, opts, &mut trace, None, opts.optimality_tolerance, opts.constraint_tolerance);
    st.report(status, opts, start)
}

/// Move `x` strictly inside its bounds.
fn interior_start(x0: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    x0.iter()
        .enumerate()
        .map(|(i, &x)| {
            let (l, u) = (lower[i], upper[i]);
            let mut push_l = BOUND_PUSH * l.abs().max(1.0);
            let mut push_u = BOUND_PUSH * u.abs().max(1.0);
            if l.is_finite() && u.is_finite() {
                push_l = push_l.min(BOUND_PUSH * (u - l));
                push_u = push_u.min(BOUND_PUSH * (u - l));
            }
            x.max(l + push_l).min(u - push_u)
        })
        .collect()
}

/// SQP on the barrier sequence `mu = 1e-1, 1e-2, ..., 1e-8`, each stage warm
/// started from the previous iterate and quasi-Newton matrix.
pub(crate) fn solve_barrier_sqp<P: NlpProblem + ?Sized>(
    problem: &P,
    x0: &[f64],
    opts: &SolverOptions,
    mut trace: Option<&mut dyn Write>,
) -> Result<SolveReport> {
    let start = Instant::now();
    let lower = problem.lower_bounds();
    let upper = problem.upper_bounds();
    let mut st = State::new(problem, interior_start(x0, &lower, &upper), opts, &upper)?;
    let mut mu = MU_START;
    loop {
        let barrier = Barrier { mu, lower: &lower, upper: &upper };
        let last = mu <= MU_END * (1.0 + 1e-9);
        let (tol, ctol) = if last {
            (opts.optimality_tolerance, opts.constraint_tolerance)
        } else {
            (opts.optimality_tolerance.max(STAGE_TOL * mu), opts.constraint_tolerance.max(STAGE_TOL * mu))
        };
        let status = iterate(problem, &mut st, opts, &mut trace, Some(&barrier), tol, ctol);
        if last || !matches!(status, SolveStatus::Converged | SolveStatus::Stagnated) {
            return st.report(status, opts, start);
        }
        mu *= MU_FACTOR;
    }
}
