/// A smooth nonlinear program
///
/// ```text
/// min f(x)  s.t.  c_eq(x) = 0,  c_in(x) <= 0,  lower <= x <= upper
/// ```
///
/// Evaluation must be a pure function of `x` so that finite-difference
/// columns can be computed concurrently.
pub trait NlpProblem: Sync {
    fn num_variables(&self) -> usize;
    fn num_equalities(&self) -> usize;
    fn num_inequalities(&self) -> usize;
    /// Lower variable bounds; `-inf` where absent.
    fn lower_bounds(&self) -> Vec<f64>;
    /// Upper variable bounds; `+inf` where absent.
    fn upper_bounds(&self) -> Vec<f64>;
    /// Fill `eq` and `ineq`, return the objective. Non-finite values signal
    /// an evaluation failure.
    fn evaluate(&self, x: &[f64], eq: &mut [f64], ineq: &mut [f64]) -> f64;
}

/// Closure-backed problem, mostly for tests and small examples.
pub struct FnProblem<F> {
    pub n: usize,
    pub m_eq: usize,
    pub m_in: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub eval: F,
}

impl<F> FnProblem<F>
where
    F: Fn(&[f64], &mut [f64], &mut [f64]) -> f64 + Sync,
{
    pub fn new(n: usize, m_eq: usize, m_in: usize, eval: F) -> Self {
        Self { n, m_eq, m_in, lower: vec![f64::NEG_INFINITY; n], upper: vec![f64::INFINITY; n], eval }
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }
}

impl<F> NlpProblem for FnProblem<F>
where
    F: Fn(&[f64], &mut [f64], &mut [f64]) -> f64 + Sync,
{
    fn num_variables(&self) -> usize {
        self.n
    }

    fn num_equalities(&self) -> usize {
        self.m_eq
    }

    fn num_inequalities(&self) -> usize {
        self.m_in
    }

    fn lower_bounds(&self) -> Vec<f64> {
        self.lower.clone()
    }

    fn upper_bounds(&self) -> Vec<f64> {
        self.upper.clone()
    }

    fn evaluate(&self, x: &[f64], eq: &mut [f64], ineq: &mut [f64]) -> f64 {
        (self.eval)(x, eq, ineq)
    }
}
