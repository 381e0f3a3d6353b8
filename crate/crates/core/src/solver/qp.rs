//! Dense strictly convex QP by the Goldfarb-Idnani dual active-set method:
//!
//! ```text
//! min 1/2 d'Hd + g'd   s.t.  a_i'd + b_i = 0 (equalities),  a_i'd + b_i >= 0 (inequalities)
//! ```
//!
//! Variable bounds are passed as signed unit rows so their normals never
//! have to be formed.

use nalgebra::{DMatrix, DVector};

/// `sign * d[var] + rhs >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BoundRow {
    pub var: usize,
    pub sign: f64,
    pub rhs: f64,
}

pub(crate) struct QpData<'a> {
    pub h: &'a DMatrix<f64>,
    pub g: &'a [f64],
    /// Columns are equality normals.
    pub eq: &'a DMatrix<f64>,
    pub eq_rhs: &'a [f64],
    /// Columns are inequality normals.
    pub ineq: &'a DMatrix<f64>,
    pub ineq_rhs: &'a [f64],
    pub bounds: &'a [BoundRow],
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct QpSolution {
    pub d: Vec<f64>,
    pub eq_mult: Vec<f64>,
    pub ineq_mult: Vec<f64>,
    pub bound_mult: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum QpError {
    NotConvex,
    Infeasible,
    IterationLimit,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Id {
    Eq(usize),
    Ineq(usize),
    Bound(usize),
}

struct Work<'a> {
    data: &'a QpData<'a>,
    n: usize,
    j: DMatrix<f64>,
    r: DMatrix<f64>,
    iq: usize,
    active: Vec<Id>,
    /// Active flags and normal lengths of the candidate inequalities.
    is_active: Vec<bool>,
    norms: Vec<f64>,
    u: Vec<f64>,
    d: Vec<f64>,
}

const FEAS_TOL: f64 = 1e-12;

impl<'a> Work<'a> {
    fn dot(&self, id: Id, v: &[f64]) -> f64 {
        match id {
            Id::Eq(i) => self.data.eq.column(i).iter().zip(v).map(|(a, b)| a * b).sum(),
            Id::Ineq(i) => self.data.ineq.column(i).iter().zip(v).map(|(a, b)| a * b).sum(),
            Id::Bound(i) => {
                let b = self.data.bounds[i];
                b.sign * v[b.var]
            }
        }
    }

    fn slack(&self, id: Id, x: &[f64]) -> f64 {
        let rhs = match id {
            Id::Eq(i) => self.data.eq_rhs[i],
            Id::Ineq(i) => self.data.ineq_rhs[i],
            Id::Bound(i) => self.data.bounds[i].rhs,
        };
        self.dot(id, x) + rhs
    }

    fn norm2(&self, id: Id) -> f64 {
        match id {
            Id::Eq(i) => self.data.eq.column(i).norm_squared(),
            Id::Ineq(i) => self.norms[i] * self.norms[i],
            Id::Bound(_) => 1.0,
        }
    }

    fn norm(&self, id: Id) -> f64 {
        match id {
            Id::Ineq(i) => self.norms[i],
            Id::Bound(_) => 1.0,
            Id::Eq(i) => self.data.eq.column(i).norm(),
        }
    }

    fn flag(&self, id: Id) -> Option<usize> {
        match id {
            Id::Eq(_) => None,
            Id::Ineq(i) => Some(i),
            Id::Bound(i) => Some(self.data.ineq.ncols() + i),
        }
    }

    /// `d = J' a` for the normal of `id`.
    fn compute_d(&mut self, id: Id) {
        for c in 0..self.n {
            let col = self.j.column(c);
            self.d[c] = match id {
                Id::Eq(i) => col.dot(&self.data.eq.column(i)),
                Id::Ineq(i) => col.dot(&self.data.ineq.column(i)),
                Id::Bound(i) => {
                    let b = self.data.bounds[i];
                    b.sign * col[b.var]
                }
            };
        }
    }

    /// Primal direction `z = J2 d2` and dual direction `r = R^{-1} d1`.
    fn directions(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let js = self.j.as_slice();
        let mut z = vec![0.0; n];
        for c in self.iq..n {
            let dc = self.d[c];
            if dc != 0.0 {
                for (zk, jk) in z.iter_mut().zip(&js[c * n..(c + 1) * n]) {
                    *zk += dc * jk;
                }
            }
        }
        // column-oriented back substitution on the upper-triangular R
        let rs = self.r.as_slice();
        let mut r = self.d[..self.iq].to_vec();
        for i in (0..self.iq).rev() {
            let col = &rs[i * n..i * n + i + 1];
            r[i] /= col[i];
            let ri = r[i];
            if ri != 0.0 {
                for (rk, a) in r[..i].iter_mut().zip(&col[..i]) {
                    *rk -= a * ri;
                }
            }
        }
        (z, r)
    }

    fn rotate_j(&mut self, a: usize, b: usize, c: f64, s: f64) {
        let n = self.n;
        let (lo, hi) = self.j.as_mut_slice().split_at_mut(b * n);
        let ca = &mut lo[a * n..(a + 1) * n];
        let cb = &mut hi[..n];
        for (t1, t2) in ca.iter_mut().zip(cb.iter_mut()) {
            let (x, y) = (*t1, *t2);
            *t1 = c * x + s * y;
            *t2 = -s * x + c * y;
        }
    }

    /// Append the constraint whose `d` is current. False if it is linearly
    /// dependent on the active set.
    fn add(&mut self, id: Id, mult: f64) -> bool {
        for jj in (self.iq + 1..self.n).rev() {
            let a = self.d[jj - 1];
            let b = self.d[jj];
            if b == 0.0 {
                continue;
            }
            let h = a.hypot(b);
            let (c, s) = (a / h, b / h);
            self.d[jj - 1] = h;
            self.d[jj] = 0.0;
            self.rotate_j(jj - 1, jj, c, s);
        }
        let scale = self.d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if self.iq >= self.n || self.d[self.iq].abs() <= 1e-12 * scale.max(1e-300) {
            return false;
        }
        for i in 0..=self.iq {
            self.r[(i, self.iq)] = self.d[i];
        }
        self.iq += 1;
        if let Some(f) = self.flag(id) {
            self.is_active[f] = true;
        }
        self.active.push(id);
        self.u.push(mult);
        true
    }

    fn drop_at(&mut self, pos: usize) {
        let iq = self.iq;
        for c in pos..iq - 1 {
            for i in 0..=c + 1 {
                self.r[(i, c)] = self.r[(i, c + 1)];
            }
        }
        for i in 0..self.n {
            self.r[(i, iq - 1)] = 0.0;
        }
        if let Some(f) = self.flag(self.active[pos]) {
            self.is_active[f] = false;
        }
        self.active.remove(pos);
        self.u.remove(pos);
        self.iq -= 1;
        for c in pos..self.iq {
            let a = self.r[(c, c)];
            let b = self.r[(c + 1, c)];
            if b == 0.0 {
                continue;
            }
            let h = a.hypot(b);
            let (cs, sn) = (a / h, b / h);
            for k in c..self.iq {
                let t1 = self.r[(c, k)];
                let t2 = self.r[(c + 1, k)];
                self.r[(c, k)] = cs * t1 + sn * t2;
                self.r[(c + 1, k)] = -sn * t1 + cs * t2;
            }
            self.r[(c + 1, c)] = 0.0;
            self.rotate_j(c, c + 1, cs, sn);
        }
    }
}

pub(crate) fn solve_qp(data: &QpData<'_>) -> Result<QpSolution, QpError> {
    let n = data.g.len();
    let chol = data.h.clone().cholesky().ok_or(QpError::NotConvex)?;
    let mut j = DMatrix::<f64>::identity(n, n);
    if !chol.l().transpose().solve_upper_triangular_mut(&mut j) {
        return Err(QpError::NotConvex);
    }
    let g = DVector::from_column_slice(data.g);
    let mut x: Vec<f64> = chol.solve(&g).iter().map(|v| -v).collect();
    let norms = (0..data.ineq.ncols()).map(|i| data.ineq.column(i).norm()).collect();
    let mut w = Work {
        data,
        n,
        j,
        r: DMatrix::zeros(n, n),
        iq: 0,
        active: Vec::new(),
        is_active: vec![false; data.ineq.ncols() + data.bounds.len()],
        norms,
        u: Vec::new(),
        d: vec![0.0; n],
    };

    for i in 0..data.eq.ncols() {
        let id = Id::Eq(i);
        w.compute_d(id);
        let (z, r) = w.directions();
        let zn: f64 = w.d[w.iq..].iter().map(|v| v * v).sum();
        let dn: f64 = w.d.iter().map(|v| v * v).sum();
        let s = w.slack(id, &x);
        if zn <= 1e-20 * dn.max(1e-300) {
            if s.abs() <= 1e-9 * (1.0 + w.norm2(id).sqrt()) {
                continue;
            }
            return Err(QpError::Infeasible);
        }
        let t = -s / zn;
        for (xk, zk) in x.iter_mut().zip(&z) {
            *xk += t * zk;
        }
        for (uk, rk) in w.u.iter_mut().zip(&r) {
            *uk -= t * rk;
        }
        if !w.add(id, t) {
            return Err(QpError::Infeasible);
        }
    }
    let meq = w.iq;
    let n_in = data.ineq.ncols();
    let candidates: Vec<Id> = (0..n_in).map(Id::Ineq).chain((0..data.bounds.len()).map(Id::Bound)).collect();
    let max_iter = 20 * (n + candidates.len()) + 100;
    let mut iter = 0;
    loop {
        // most violated inactive inequality, relative to its normal length
        let mut worst = None;
        let mut worst_val = 0.0;
        for (f, &id) in candidates.iter().enumerate() {
            if w.is_active[f] {
                continue;
            }
            let s = w.slack(id, &x);
            let norm = w.norm(id);
            if s < -FEAS_TOL * (1.0 + norm) {
                let v = s / norm;
                if v < worst_val {
                    worst_val = v;
                    worst = Some(id);
                }
            }
        }
        let Some(p) = worst else { break };
        let mut u_new = 0.0;
        loop {
            iter += 1;
            if iter > max_iter {
                return Err(QpError::IterationLimit);
            }
            w.compute_d(p);
            let (z, r) = w.directions();
            let mut t1 = f64::INFINITY;
            let mut drop = None;
            for k in meq..w.iq {
                if r[k] > 1e-14 {
                    let ratio = w.u[k] / r[k];
                    if ratio < t1 {
                        t1 = ratio;
                        drop = Some(k);
                    }
                }
            }
            let zn: f64 = w.d[w.iq..].iter().map(|v| v * v).sum();
            let dn: f64 = w.d.iter().map(|v| v * v).sum();
            let s = w.slack(p, &x);
            let t2 = if zn > 1e-20 * dn.max(1e-300) { -s / zn } else { f64::INFINITY };
            let t = t1.min(t2);
            if !t.is_finite() {
                return Err(QpError::Infeasible);
            }
            if t2.is_finite() {
                for (xk, zk) in x.iter_mut().zip(&z) {
                    *xk += t * zk;
                }
            }
            for (uk, rk) in w.u.iter_mut().zip(&r) {
                *uk -= t * rk;
            }
            u_new += t;
            if t == t2 {
                if !w.add(p, u_new) {
                    return Err(QpError::Infeasible);
                }
                break;
            }
            let pos = drop.expect("finite t1 comes with a blocking constraint");
            w.drop_at(pos);
            if w.slack(p, &x) >= -FEAS_TOL * (1.0 + w.norm(p)) {
                break;
            }
        }
    }

    let mut sol = QpSolution {
        d: x,
        eq_mult: vec![0.0; data.eq.ncols()],
        ineq_mult: vec![0.0; n_in],
        bound_mult: vec![0.0; data.bounds.len()],
    };
    for (id, u) in w.active.iter().zip(&w.u) {
        match *id {
            Id::Eq(i) => sol.eq_mult[i] = *u,
            Id::Ineq(i) => sol.ineq_mult[i] = *u,
            Id::Bound(i) => sol.bound_mult[i] = *u,
        }
    }
    Ok(sol)
}
