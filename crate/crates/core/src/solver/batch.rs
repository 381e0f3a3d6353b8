use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::options::{SolveReport, SolveStatus, SolverOptions};
use super::problem::NlpProblem;
use super::solve;
use crate::error::{Error, Result};

/// Aggregate statistics over a batch; iteration, objective and runtime
/// figures cover the converged trials only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub trials: usize,
    pub successes: usize,
    pub iteration_mean: Option<f64>,
    pub objective_mean: Option<f64>,
    pub objective_min: Option<f64>,
    pub objective_max: Option<f64>,
    /// 25th, 50th and 75th percentile of wall time.
    pub runtime_quartiles: Option<[f64; 3]>,
}

/// Linearly interpolated percentile of sorted data, `p` in `[0, 1]`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

impl BatchStats {
    pub fn from_reports(reports: &[SolveReport]) -> Self {
        let ok: Vec<&SolveReport> = reports.iter().filter(|r| r.converged).collect();
        let mean = |f: &dyn Fn(&SolveReport) -> f64| {
            (!ok.is_empty()).then(|| ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64)
        };
        let mut times: Vec<f64> = ok.iter().map(|r| r.wall_time).collect();
        times.sort_by(f64::total_cmp);
        Self {
            trials: reports.len(),
            successes: ok.len(),
            iteration_mean: mean(&|r| r.iterations as f64),
            objective_mean: mean(&|r| r.objective),
            objective_min: ok.iter().map(|r| r.objective).min_by(f64::total_cmp),
            objective_max: ok.iter().map(|r| r.objective).max_by(f64::total_cmp),
            runtime_quartiles: (!times.is_empty())
                .then(|| [percentile(&times, 0.25), percentile(&times, 0.5), percentile(&times, 0.75)]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    pub reports: Vec<SolveReport>,
    pub stats: BatchStats,
}

/// Report standing in for a trial whose evaluation failed outright.
pub fn failed_report(err: &Error, n: usize) -> SolveReport {
    let chi = match err {
        Error::NonFiniteIterate { chi } => chi.clone(),
        _ => vec![f64::NAN; n],
    };
    SolveReport {
        converged: false,
        status: SolveStatus::EvaluationFailure,
        iterations: 0,
        objective: f64::NAN,
        chi,
        max_eq_violation: f64::NAN,
        max_ineq_violation: f64::NAN,
        wall_time: 0.0,
    }
}

/// Run `trials` independent trials in parallel. Trial `i` receives its own
/// generator seeded with `seed + i`, so results do not depend on scheduling.
pub fn batch_run<F>(trials: usize, seed: u64, run: F) -> BatchResult
where
    F: Fn(usize, &mut ChaCha8Rng) -> SolveReport + Sync,
{
    let reports: Vec<SolveReport> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            run(i, &mut rng)
        })
        .collect();
    let stats = BatchStats::from_reports(&reports);
    BatchResult { reports, stats }
}

/// Solve one problem from `trials` sampled starting points.
pub fn batch_solve<P, F, S>(problem_factory: F, trials: usize, init_sampler: S, options: &SolverOptions) -> Result<BatchResult>
where
    P: NlpProblem,
    F: Fn() -> P + Sync,
    S: Fn(&mut ChaCha8Rng, usize) -> Vec<f64> + Sync,
{
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    options.validate()?;
    Ok(batch_run(trials, options.rng_seed, |i, rng| {
        let problem = problem_factory();
        let x0 = init_sampler(rng, i);
        solve(&problem, &x0, options).unwrap_or_else(|e| failed_report(&e, problem.num_variables()))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(percentile(&v, 0.5), 3.0);
        assert_eq!(percentile(&v, 0.25), 2.0);
        assert_eq!(percentile(&[1.0, 2.0], 0.5), 1.5);
    }
}
