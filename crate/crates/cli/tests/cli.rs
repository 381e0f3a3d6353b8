use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dopic(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dopic")).args(args).arg("--out").arg(out).env_remove("DOPIC_OUT").output().unwrap()
}

fn plot_data(cell: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dopic")).arg("plot-data").arg(cell).output().unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const MIN_FUEL: &[&str] = &["run", "--problem", "min-fuel", "--grid", "cg", "--n", "50", "--trials", "3", "--seed", "7"];

#[test]
fn run_writes_artifacts_and_summary_recomputes_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dopic(MIN_FUEL, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cell = dir.path().join("min-fuel-cg-n50");
    for f in ["trials.csv", "trajectory.csv", "summary.json", "timings.csv", "descriptor.json", "best.json"] {
        assert!(cell.join(f).exists(), "{f}");
    }

    let (header, rows) = read_csv(&cell.join("trials.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert!(!header.contains(&"wall_time".to_string()));
    let converged: Vec<&Vec<String>> = rows.iter().filter(|r| r[col("converged")] == "true").collect();
    let objectives: Vec<f64> = converged.iter().map(|r| r[col("objective")].parse().unwrap()).collect();
    let iterations: Vec<f64> = converged.iter().map(|r| r[col("iterations")].parse().unwrap()).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;

    let s = json(&cell.join("summary.json"));
    assert_eq!(s["successes"].as_u64().unwrap() as usize, converged.len());
    assert_eq!(s["trials"].as_u64().unwrap(), 3);
    assert_eq!(s["objective_mean"].as_f64().unwrap().to_bits(), mean(&objectives).to_bits());
    assert_eq!(s["iteration_mean"].as_f64().unwrap().to_bits(), mean(&iterations).to_bits());
    let min = objectives.iter().copied().fold(f64::INFINITY, f64::min);
    assert_eq!(s["objective_min"].as_f64().unwrap().to_bits(), min.to_bits());
    // analytic cost 10 sqrt(2)
    assert!((min - 10.0 * 2f64.sqrt()).abs() / (10.0 * 2f64.sqrt()) < 0.02);

    // keys are written sorted
    let text = fs::read_to_string(cell.join("summary.json")).unwrap();
    let keys: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn identical_descriptors_give_identical_artifacts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(dopic(MIN_FUEL, a.path()).status.success());
    assert!(dopic(MIN_FUEL, b.path()).status.success());
    for f in ["min-fuel-cg-n50/trials.csv", "min-fuel-cg-n50/summary.json", "min-fuel-cg-n50/trajectory.csv", "overview.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn csv_numbers_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert!(dopic(MIN_FUEL, dir.path()).status.success());
    let (_, rows) = read_csv(&dir.path().join("min-fuel-cg-n50/trajectory.csv"));
    for v in rows.iter().flatten() {
        let x: f64 = v.parse().unwrap();
        if x.is_finite() {
            assert_eq!(format!("{x:.16e}"), *v);
        }
    }
}

#[test]
fn min_fuel_plot_bundle() {
    let dir = tempfile::tempdir().unwrap();
    assert!(dopic(MIN_FUEL, dir.path()).status.success());
    let cell = dir.path().join("min-fuel-cg-n50");
    let out = plot_data(&cell);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&cell.join("plot_min_fuel.csv"));
    assert_eq!(header, ["t", "x", "x_dot", "u", "u_min", "u_max"]);
    assert_eq!(rows.len(), 51);
    for r in &rows {
        assert_eq!(r[4].parse::<f64>().unwrap(), -1.0);
        assert_eq!(r[5].parse::<f64>().unwrap(), 1.0);
    }
}

#[test]
fn orbit_plot_bundle_has_polar_angle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dopic(&["run", "--problem", "orbit-min-time", "--grid", "lgl", "--n", "20", "--trials", "2", "--seed", "1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cell = dir.path().join("orbit-min-time-lgl-n20");
    assert!(plot_data(&cell).status.success());
    let (header, rows) = read_csv(&cell.join("plot_orbit.csv"));
    assert_eq!(header, ["t", "r", "r_dot", "vt", "phi", "theta"]);
    let theta: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    assert!(theta.windows(2).all(|w| w[1] > w[0]), "polar angle increases along a prograde transfer");
}

#[test]
fn breakwell_plot_bundle() {
    let dir = tempfile::tempdir().unwrap();
    assert!(dopic(&["run", "--problem", "breakwell", "--grid", "lgl", "--n", "25"], dir.path()).status.success());
    let cell = dir.path().join("breakwell-lgl-n25");
    assert!(plot_data(&cell).status.success());
    let (header, _) = read_csv(&cell.join("plot_breakwell.csv"));
    assert_eq!(header, ["t", "x", "x_dot", "u", "x_limit"]);
}

#[test]
fn order_sweep_writes_one_cell_per_order() {
    let dir = tempfile::tempdir().unwrap();
    let out = dopic(&["run", "--problem", "min-fuel", "--grid", "lgl", "--n", "15:5:25"], dir.path());
    assert!(out.status.success());
    let (header, rows) = read_csv(&dir.path().join("overview.csv"));
    assert_eq!(&header[..4], ["grid", "n", "trials", "successes"]);
    let ns: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(ns, ["15", "20", "25"]);
    for n in [15, 20, 25] {
        assert!(dir.path().join(format!("min-fuel-lgl-n{n}/summary.json")).exists());
    }
    assert!(dir.path().join("overview_timings.csv").exists());
}

#[test]
fn compare_prints_one_row_per_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dopic(&["compare", "--problem", "breakwell", "--grid", "cg,lg,lgl", "--n", "20"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 4, "{stdout}");
    for label in ["CG", "LG", "LGL"] {
        assert!(stdout.lines().any(|l| l.starts_with(label)), "{stdout}");
    }
}

#[test]
fn no_converged_trial_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dopic(&["run", "--problem", "min-fuel", "--n", "20", "--max-iterations", "1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let cell = dir.path().join("min-fuel-cg-n20");
    assert!(cell.join("trials.csv").exists());
    assert!(!cell.join("trajectory.csv").exists());
    assert_eq!(plot_data(&cell).status.code(), Some(2));
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "--problem", "moon-landing"][..],
        &["run", "--problem", "min-fuel", "--n", "5"],
        &["run", "--problem", "min-fuel", "--grid", "cg", "--basis", "legendre"],
        &["run", "--problem", "min-fuel", "--solver", "newton"],
        &["run", "--grid", "cg"],
    ] {
        let out = dopic(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn config_file_and_env_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"problem": "breakwell", "grids": ["lg"], "orders": [20], "trials": 2, "seed": 3,
            "settings": {"breakwell": {"l": 0.2}}}"#,
    )
    .unwrap();
    let root = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_dopic"))
        .args(["run", "--config"])
        .arg(&config)
        .args(["--trials", "1"])
        .env("DOPIC_OUT", &root)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = json(&root.join("breakwell-lg-n20/summary.json"));
    assert_eq!(s["trials"].as_u64(), Some(1));
    assert_eq!(s["seed"].as_u64(), Some(3));
    let d = json(&root.join("breakwell-lg-n20/descriptor.json"));
    assert_eq!(d["settings"]["breakwell"]["l"].as_f64(), Some(0.2));
}
