//! Artifact files of one run cell. Everything except the timing files is a
//! deterministic function of the descriptor.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use dopic::poly::NodeFamily;
use dopic::problems::Benchmark;
use dopic::solver::{percentile, BatchResult, BatchStats, SolveReport, SolverOptions};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::descriptor::RunDescriptor;

pub const SCHEMA_VERSION: u32 = 1;

/// Round-trip safe: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Pretty JSON with sorted keys.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let v: Value = serde_json::to_value(value)?;
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table(path: &Path, columns: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| fmt_f64(*v)).collect()).collect();
    write_csv(path, columns, &rows)
}

/// Best converged trial: lowest objective, earliest on ties.
pub fn best_trial(reports: &[SolveReport]) -> Option<usize> {
    reports
        .iter()
        .enumerate()
        .filter(|(_, r)| r.converged)
        .min_by(|a, b| a.1.objective.total_cmp(&b.1.objective))
        .map(|(i, _)| i)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BestTrial {
    pub trial: usize,
    pub seed: u64,
    pub chi: Vec<f64>,
}

/// One row of the cross-cell overview.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub grid: NodeFamily,
    pub n: usize,
    pub stats: BatchStats,
    pub best_metrics: BTreeMap<String, f64>,
}

fn status_name(r: &SolveReport) -> String {
    match serde_json::to_value(r.status) {
        Ok(Value::String(s)) => s,
        _ => format!("{:?}", r.status),
    }
}

/// Deterministic part of the summary, computed from the reports alone.
pub fn summary_json(desc: &RunDescriptor, grid: NodeFamily, n: usize, options: &SolverOptions, batch: &BatchResult, best: Option<(usize, &BTreeMap<String, f64>)>) -> Value {
    let s = &batch.stats;
    let mut statuses: BTreeMap<String, usize> = BTreeMap::new();
    for r in &batch.reports {
        *statuses.entry(status_name(r)).or_default() += 1;
    }
    json!({
        "schema_version": SCHEMA_VERSION,
        "problem": desc.problem,
        "grid": grid,
        "family": grid.poly_family(),
        "n": n,
        "trials": s.trials,
        "seed": desc.seed,
        "solver": options,
        "successes": s.successes,
        "iteration_mean": s.iteration_mean,
        "objective_mean": s.objective_mean,
        "objective_min": s.objective_min,
        "objective_max": s.objective_max,
        "status_counts": statuses,
        "best_trial": best.map(|b| b.0),
        "best_metrics": best.map(|b| b.1.clone()),
    })
}

/// Run one (grid, n) cell and write its artifacts into `dir`.
pub fn run_cell(desc: &RunDescriptor, grid: NodeFamily, n: usize, dir: &Path) -> Result<CellOutcome> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let spec = desc.basis_spec(grid, n)?;
    let bench = Benchmark::build(desc.problem, spec, &desc.settings)?;
    let options = desc.options();
    let batch = bench.batch(desc.trials, &options)?;

    let metrics: Vec<BTreeMap<String, f64>> = batch
        .reports
        .iter()
        .map(|r| if r.chi.iter().all(|v| v.is_finite()) { bench.metrics(&r.chi).unwrap_or_default() } else { BTreeMap::new() })
        .collect();
    // the objective already has its own column
    let keys: BTreeSet<&String> = metrics.iter().flat_map(|m| m.keys()).filter(|k| *k != "objective").collect();

    let mut header: Vec<String> = ["trial", "seed", "converged", "status", "iterations", "objective", "max_eq_violation", "max_ineq_violation"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(keys.iter().map(|k| k.to_string()));
    let rows: Vec<Vec<String>> = batch
        .reports
        .iter()
        .zip(&metrics)
        .enumerate()
        .map(|(i, (r, m))| {
            let mut row = vec![
                i.to_string(),
                desc.seed.wrapping_add(i as u64).to_string(),
                r.converged.to_string(),
                status_name(r),
                r.iterations.to_string(),
                fmt_f64(r.objective),
                fmt_f64(r.max_eq_violation),
                fmt_f64(r.max_ineq_violation),
            ];
            row.extend(keys.iter().map(|k| fmt_f64(m.get(*k).copied().unwrap_or(f64::NAN))));
            row
        })
        .collect();
    write_csv(&dir.join("trials.csv"), &header, &rows)?;

    let timing_rows: Vec<Vec<String>> =
        batch.reports.iter().enumerate().map(|(i, r)| vec![i.to_string(), fmt_f64(r.wall_time)]).collect();
    write_csv(&dir.join("timings.csv"), &["trial".into(), "wall_time_s".into()], &timing_rows)?;
    let all_times: Vec<f64> = {
        let mut t: Vec<f64> = batch.reports.iter().map(|r| r.wall_time).collect();
        t.sort_by(f64::total_cmp);
        t
    };
    write_json(
        &dir.join("timings.json"),
        &json!({
            "converged_runtime_quartiles_s": batch.stats.runtime_quartiles,
            "all_runtime_quartiles_s": [percentile(&all_times, 0.25), percentile(&all_times, 0.5), percentile(&all_times, 0.75)],
            "total_s": all_times.iter().sum::<f64>(),
        }),
    )?;

    let best = best_trial(&batch.reports);
    let empty = BTreeMap::new();
    let best_metrics = best.map(|i| &metrics[i]).unwrap_or(&empty);
    write_json(&dir.join("summary.json"), &summary_json(desc, grid, n, &options, &batch, best.map(|i| (i, &metrics[i]))))?;
    let cell = RunDescriptor { grids: vec![grid], orders: vec![n], ..desc.clone() };
    write_json(&dir.join("descriptor.json"), &cell)?;

    let _ = fs::remove_file(dir.join("trajectory.csv"));
    let _ = fs::remove_file(dir.join("best.json"));
    if let Some(i) = best {
        let chi = &batch.reports[i].chi;
        let table = bench.full().trajectory_table(chi)?;
        write_table(&dir.join("trajectory.csv"), &table.columns, &table.rows)?;
        write_json(&dir.join("best.json"), &BestTrial { trial: i, seed: desc.seed.wrapping_add(i as u64), chi: chi.clone() })?;
    }
    Ok(CellOutcome { grid, n, stats: batch.stats.clone(), best_metrics: best_metrics.clone() })
}

/// Cross-cell overview: deterministic columns in `overview.csv`, runtimes in
/// `overview_timings.csv`.
pub fn write_overview(root: &Path, cells: &[CellOutcome]) -> Result<()> {
    let keys: BTreeSet<&String> = cells.iter().flat_map(|c| c.best_metrics.keys()).filter(|k| *k != "objective").collect();
    let opt = |v: Option<f64>| fmt_f64(v.unwrap_or(f64::NAN));
    let mut header: Vec<String> =
        ["grid", "n", "trials", "successes", "iteration_mean", "objective_mean", "objective_min", "objective_max"]
            .iter()
            .map(|s| s.to_string())
            .collect();
    header.extend(keys.iter().map(|k| format!("best_{k}")));
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            let s = &c.stats;
            let mut row = vec![
                c.grid.to_string(),
                c.n.to_string(),
                s.trials.to_string(),
                s.successes.to_string(),
                opt(s.iteration_mean),
                opt(s.objective_mean),
                opt(s.objective_min),
                opt(s.objective_max),
            ];
            row.extend(keys.iter().map(|k| fmt_f64(c.best_metrics.get(*k).copied().unwrap_or(f64::NAN))));
            row
        })
        .collect();
    write_csv(&root.join("overview.csv"), &header, &rows)?;
    let rows: Vec<Vec<String>> = cells
        .iter()
        .map(|c| {
            let q = c.stats.runtime_quartiles.unwrap_or([f64::NAN; 3]);
            vec![c.grid.to_string(), c.n.to_string(), fmt_f64(q[0]), fmt_f64(q[1]), fmt_f64(q[2])]
        })
        .collect();
    let header: Vec<String> = ["grid", "n", "runtime_q25_s", "runtime_q50_s", "runtime_q75_s"].iter().map(|s| s.to_string()).collect();
    write_csv(&root.join("overview_timings.csv"), &header, &rows)
}
