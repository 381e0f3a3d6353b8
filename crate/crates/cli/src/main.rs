mod artifacts;
mod descriptor;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dopic::poly::PolyFamily;
use dopic::problems::{ProblemName, ProblemSettings};
use dopic::solver::Algorithm;

use artifacts::{fmt_f64, run_cell, write_json, write_overview, CellOutcome};
use descriptor::{parse_grids, parse_orders, RunDescriptor, SolverOverrides};

#[derive(Parser)]
#[command(name = "dopic", version, about = "Orthogonal polynomial integral collocation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run random-start trials over a (grid, n) matrix and write artifacts.
    Run(RunArgs),
    /// Run every listed grid and print one comparison row per grid.
    Compare(RunArgs),
    /// Write per-figure CSV bundles for a run cell directory.
    PlotData {
        /// Cell directory written by `run` (contains descriptor.json).
        cell: PathBuf,
        /// Output directory; defaults to the cell directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON run descriptor; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// Polynomial family (cp1k, cp2k, legendre); checked against each grid.
    #[arg(long)]
    basis: Option<String>,
    /// Node family or comma list (cg, cgl, cp2k, lg, lgl, all).
    #[arg(long)]
    grid: Option<String>,
    /// Order: `50`, `20,30` or `start:step:end`.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// sqp or interior-point.
    #[arg(long)]
    solver: Option<String>,
    /// Optimality tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Output root.
    #[arg(long, env = "DOPIC_OUT", default_value = "runs")]
    out: PathBuf,
    /// Orbit problems: solve without the rate block first (default true).
    #[arg(long)]
    stage_rate_constraints: Option<bool>,
}

impl RunArgs {
    fn descriptor(&self, default_grids: &str) -> Result<RunDescriptor> {
        let mut d = match &self.config {
            Some(path) => RunDescriptor::load(path)?,
            None => {
                let problem = self.problem.as_deref().context("--problem is required without --config")?;
                RunDescriptor {
                    problem: problem.parse()?,
                    basis: None,
                    grids: parse_grids(default_grids)?,
                    orders: vec![40],
                    trials: 1,
                    seed: 0,
                    solver: SolverOverrides::default(),
                    settings: ProblemSettings::default(),
                }
            }
        };
        if let Some(p) = &self.problem {
            d.problem = p.parse::<ProblemName>()?;
        }
        if let Some(b) = &self.basis {
            d.basis = Some(b.parse::<PolyFamily>()?);
        }
        if let Some(g) = &self.grid {
            d.grids = parse_grids(g)?;
        }
        if let Some(n) = &self.n {
            d.orders = parse_orders(n)?;
        }
        if let Some(t) = self.trials {
            d.trials = t;
        }
        if let Some(s) = self.seed {
            d.seed = s;
        }
        if let Some(s) = &self.solver {
            d.solver.algorithm = Some(s.parse::<Algorithm>()?);
        }
        if let Some(t) = self.tol {
            d.solver.optimality_tolerance = Some(t);
        }
        if let Some(m) = self.max_iterations {
            d.solver.max_iterations = Some(m);
        }
        if let Some(s) = self.stage_rate_constraints {
            d.settings.stage_rate_constraints = s;
        }
        d.validate()?;
        Ok(d)
    }
}

fn run_matrix(desc: &RunDescriptor, root: &Path) -> Result<Vec<CellOutcome>> {
    std::fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
    write_json(&root.join("descriptor.json"), desc)?;
    let mut cells = Vec::new();
    for &grid in &desc.grids {
        for &n in &desc.orders {
            let dir = desc.cell_dir(root, grid, n);
            let cell = run_cell(desc, grid, n, &dir)?;
            eprintln!(
                "{} {grid} n={n}: {}/{} converged, best objective {}",
                desc.problem,
                cell.stats.successes,
                cell.stats.trials,
                cell.stats.objective_min.map_or("-".into(), fmt_f64)
            );
            cells.push(cell);
        }
    }
    write_overview(root, &cells)?;
    Ok(cells)
}

fn print_comparison(cells: &[CellOutcome]) {
    println!("{:<6} {:>4} {:>9} {:>10} {:>24} {:>12}", "grid", "n", "success", "iter_mean", "objective_mean", "runtime_s");
    for c in cells {
        let s = &c.stats;
        let runtime = s.runtime_quartiles.map_or(f64::NAN, |q| q[1]);
        println!(
            "{:<6} {:>4} {:>5}/{:<3} {:>10.1} {:>24} {:>12.3}",
            c.grid.label(),
            c.n,
            s.successes,
            s.trials,
            s.iteration_mean.unwrap_or(f64::NAN),
            s.objective_mean.map_or("-".into(), fmt_f64),
            runtime
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => args.descriptor("cg").and_then(|d| run_matrix(&d, &args.out)).map(|cells| {
            cells.iter().any(|c| c.stats.successes > 0)
        }),
        Command::Compare(args) => args.descriptor("all").and_then(|d| run_matrix(&d, &args.out)).map(|cells| {
            print_comparison(&cells);
            cells.iter().any(|c| c.stats.successes > 0)
        }),
        Command::PlotData { cell, out } => plot::emit_plot_data(&cell, out.as_deref()).map(|files| {
            for f in files {
                println!("{}", f.display());
            }
            true
        }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("no trial converged");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
