use dopic::problems::{
    analytic_breakwell, analytic_min_fuel, min_fuel_minimum_time, recover_polar_angle, BreakwellProblem, BreakwellRegime,
    MinFuelProblem, OrbitMode, OrbitRaisingProblem, RocketLandingProblem,
};
use dopic::solver::NlpProblem;
use dopic::transcription::ChiPieces;
use dopic::{BasisSpec, Benchmark, NodeFamily, ProblemName, ProblemSettings, SolverOptions, Transcription};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dims(tr: &Transcription) -> (usize, usize, usize) {
    (tr.layout().len(), tr.num_equalities(), tr.num_inequalities_full())
}

fn build(name: ProblemName, grid: NodeFamily, n: usize, settings: &ProblemSettings) -> Benchmark {
    Benchmark::build(name, BasisSpec::for_grid(grid, n), settings).unwrap()
}

#[test]
fn constraint_dimensions_match_published_sizes() {
    let direct = ProblemSettings {
        min_fuel: MinFuelProblem { split_control: false, ..MinFuelProblem::default() },
        ..ProblemSettings::default()
    };
    for grid in NodeFamily::ALL {
        for n in [15, 40, 60] {
            let n1 = n + 1;
            let b = build(ProblemName::MinFuel, grid, n, &direct);
            assert_eq!(dims(b.full()), (2 * n1, n + 5, 2 * n1));
            let b = build(ProblemName::Breakwell, grid, n, &direct);
            assert_eq!(dims(b.full()), (2 * n1, n + 5, n1));
            let b = build(ProblemName::OrbitMinTime, grid, n, &direct);
            assert_eq!(dims(b.full()), (3 * n1 + 1, 2 * n1 + 6, 3 * n1));
            let b = build(ProblemName::OrbitMaxRadius, grid, n, &direct);
            assert_eq!(dims(b.full()), (3 * n1, 2 * n1 + 5, 3 * n1 - 1));
            let b = build(ProblemName::RocketLanding, grid, n, &direct);
            assert_eq!(dims(b.full()), (6 * n1 + 1, 4 * n1 + 13, 7 * n1));
        }
    }
}

#[test]
fn split_min_fuel_dimensions() {
    let n = 50;
    let b = build(ProblemName::MinFuel, NodeFamily::Cg, n, &ProblemSettings::default());
    assert_eq!(dims(b.full()), (3 * (n + 1), n + 5, 4 * (n + 1)));
    assert_eq!(b.full().num_inequalities(), 0);
}

#[test]
fn orbit_stage_one_drops_rate_rows() {
    let b = build(ProblemName::OrbitMinTime, NodeFamily::Lgl, 40, &ProblemSettings::default());
    assert_eq!(b.stages().len(), 2);
    assert_eq!(b.stages()[1].num_inequalities_full() - b.stages()[0].num_inequalities_full(), 40);
    assert_eq!(b.stages()[0].layout(), b.stages()[1].layout());
    let single = ProblemSettings { stage_rate_constraints: false, ..ProblemSettings::default() };
    assert_eq!(build(ProblemName::OrbitMinTime, NodeFamily::Lgl, 40, &single).stages().len(), 1);
}

#[test]
fn min_fuel_horizon() {
    let p = MinFuelProblem::default();
    let tf_min = 10.0 + 200f64.sqrt();
    assert!((p.tf_min() - tf_min).abs() < 1e-12);
    assert!((p.tf() - 1.5 * tf_min).abs() < 1e-12);
    assert!((p.tf() - 36.2132).abs() < 1e-4);
    assert!(MinFuelProblem { xdot0: -1.0, ..p }.build().is_err());
    assert!(MinFuelProblem { horizon_factor: 0.9, ..p }.build().is_err());
}

fn simulate(control: impl Fn(f64) -> f64, x0: f64, v0: f64, tf: f64, steps: usize) -> (f64, f64, f64) {
    // exact integration of a piecewise-constant control sampled at midpoints
    let h = tf / steps as f64;
    let (mut x, mut v, mut fuel) = (x0, v0, 0.0);
    for i in 0..steps {
        let u = control((i as f64 + 0.5) * h);
        x += v * h + 0.5 * u * h * h;
        v += u * h;
        fuel += u.abs() * h;
    }
    (x, v, fuel)
}

#[test]
fn min_fuel_oracle_reaches_origin() {
    for (x0, v0, factor) in [(0.0, 10.0, 1.5), (3.0, 2.0, 1.2), (-1.0, 2.0, 2.0), (5.0, 0.0, 1.5)] {
        let tf = factor * min_fuel_minimum_time(x0, v0);
        let s = analytic_min_fuel(x0, v0, tf).unwrap();
        assert!(0.0 < s.t1 && s.t1 < s.t2 && s.t2 < tf);
        // switch times fall on step boundaries only by accident, so refine
        let (x, v, fuel) = simulate(|t| s.control(t), x0, v0, tf, 400_000);
        assert!(x.abs() < 1e-3 && v.abs() < 1e-3, "({x0}, {v0}): {x} {v}");
        assert!((fuel - s.cost).abs() < 1e-3);
        for t in [0.0, 0.5 * s.t1, 0.5 * (s.t1 + s.t2), s.t2 + 0.5 * (tf - s.t2)] {
            assert_eq!(s.control(t).abs().fract(), 0.0);
        }
        let (xe, ve) = s.state(tf);
        assert!(xe.abs() < 1e-10 && ve.abs() < 1e-10);
    }
    assert!(analytic_min_fuel(0.0, 10.0, 20.0).is_err());
}

#[test]
fn breakwell_oracle_costs_and_boundaries() {
    for (l, regime) in [
        (1.0 / 7.0, BreakwellRegime::Bifurcated),
        (1.0 / 5.0, BreakwellRegime::Osculating),
        (1.0 / 3.0, BreakwellRegime::Parabolic),
        (0.25, BreakwellRegime::Parabolic),
        (1.0 / 6.0, BreakwellRegime::Osculating),
    ] {
        let s = analytic_breakwell(l).unwrap();
        assert_eq!(s.regime, regime);
        let (x0, v0, _) = s.evaluate(0.0);
        let (x1, v1, _) = s.evaluate(1.0);
        assert!(x0.abs() < 1e-12 && (v0 - 1.0).abs() < 1e-12 && x1.abs() < 1e-12 && (v1 + 1.0).abs() < 1e-12);
        // cost by dense midpoint rule, state by forward integration of u
        let steps = 200_000;
        let h = 1.0 / steps as f64;
        let (mut x, mut v, mut j, mut xmax) = (0.0, 1.0, 0.0, 0.0f64);
        for i in 0..steps {
            let u = s.evaluate((i as f64 + 0.5) * h).2;
            x += v * h + 0.5 * u * h * h;
            v += u * h;
            j += 0.5 * u * u * h;
            xmax = xmax.max(x);
        }
        assert!((j - s.cost).abs() < 1e-6, "l = {l}: {j} vs {}", s.cost);
        assert!(x.abs() < 1e-6 && (v + 1.0).abs() < 1e-6);
        assert!(xmax <= l + 1e-6);
    }
    assert!((analytic_breakwell(1.0 / 7.0).unwrap().cost - 28.0 / 9.0).abs() < 1e-12);
    assert!(analytic_breakwell(0.0).is_err());
    assert!(BreakwellProblem::new(-0.1).is_err());
}

#[test]
fn min_fuel_solve_tracks_oracle() {
    let settings = ProblemSettings::default();
    let b = build(ProblemName::MinFuel, NodeFamily::Lgl, 30, &settings);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let r = b.run_trial(&mut rng, &SolverOptions::default());
    assert!(r.converged, "{:?}", r.status);
    let m = b.metrics(&r.chi).unwrap();
    assert!((m["objective"] - m["analytic_objective"]).abs() / m["analytic_objective"] < 0.02);
    let traj = b.full().trajectory(&r.chi).unwrap();
    for k in 0..traj.len() {
        let u = traj.controls[0][k] - traj.controls[1][k];
        assert!(u.abs() <= 1.0 + 1e-8);
    }
}

#[test]
fn breakwell_unconstrained_case_is_inactive() {
    let settings = ProblemSettings { breakwell: BreakwellProblem::new(1.0 / 3.0).unwrap(), ..Default::default() };
    let b = build(ProblemName::Breakwell, NodeFamily::Cgl, 25, &settings);
    let r = b.run_trial(&mut ChaCha8Rng::seed_from_u64(0), &SolverOptions::default());
    assert!(r.converged);
    let cin = b.full().inequalities_full(&r.chi).unwrap();
    assert!(cin.iter().all(|&c| c < -1e-3));
    assert!((r.objective - 2.0).abs() < 1e-6);
}

#[test]
fn polar_angle_of_circular_coast() {
    let b = build(ProblemName::OrbitMaxRadius, NodeFamily::Lg, 20, &ProblemSettings::default());
    let tr = b.full();
    let layout = tr.layout();
    // zero coefficients reproduce r = 1, r' = 0, vt = 1 throughout
    let chi = layout
        .pack(&ChiPieces { alphas: vec![vec![0.0; 21]; 2], controls: vec![vec![0.0; 21]], t0: None, tf: None })
        .unwrap();
    let theta = recover_polar_angle(tr, &chi).unwrap();
    for (t, th) in theta.t.iter().zip(&theta.theta) {
        assert!((t - th).abs() < 1e-12);
    }
    assert!((theta.theta_final - 3.32).abs() < 1e-12);

    let lgl = build(ProblemName::OrbitMinTime, NodeFamily::Lgl, 20, &ProblemSettings::default());
    let mut chi = vec![0.0; lgl.full().layout().len()];
    *chi.last_mut().unwrap() = 2.0;
    let theta = recover_polar_angle(lgl.full(), &chi).unwrap();
    assert_eq!(theta.theta[0], 0.0);
}

#[test]
fn polar_angle_rejects_collapsed_radius() {
    let b = build(ProblemName::OrbitMaxRadius, NodeFamily::Cg, 10, &ProblemSettings::default());
    let tr = b.full();
    let mut pieces = tr.layout().unpack(&vec![0.0; tr.layout().len()]).unwrap();
    // r'' chosen so that r(t) = 1 - t^2 / 2 crosses zero inside the horizon
    pieces.alphas[0][0] = -(3.32f64 / 2.0).powi(2);
    let chi = tr.layout().pack(&pieces).unwrap();
    assert!(recover_polar_angle(tr, &chi).is_err());
}

#[test]
fn orbit_constants() {
    let p = OrbitRaisingProblem::new(OrbitMode::MinTime);
    assert_eq!((p.mu, p.thrust, p.m0, p.mdot), (1.0, 0.1405, 1.0, -0.07487));
    assert!((p.rate_max - 400f64.to_radians()).abs() < 1e-15);
    assert_eq!(OrbitRaisingProblem::new(OrbitMode::MaxRadius).tf_fixed, 3.32);
    assert_eq!("max-radius".parse::<OrbitMode>().unwrap(), OrbitMode::MaxRadius);
}

#[test]
fn rocket_scaling() {
    let p = RocketLandingProblem::default();
    let c = p.constants();
    assert!((c.c[2] - 1.0).abs() < 1e-15);
    assert!((c.beta - (1000.0f64 / 9.81).sqrt()).abs() < 1e-12);
    assert!(c.c.iter().all(|&v| v > 0.0));
    assert!((p.t_max - 280.0 * 1000.0 * 9.81).abs() < 1e-6);
    assert!((p.a_ref - 450.0).abs() < 1e-12);
    let b = build(ProblemName::RocketLanding, NodeFamily::Cg, 20, &ProblemSettings::default());
    let chi = b.initial_guess(&mut ChaCha8Rng::seed_from_u64(1));
    let ends = b.full().trajectory(&chi).unwrap();
    assert_eq!(ends.endpoints().initial(0, 0), 1.0);
    assert_eq!(ends.endpoints().initial(3, 0), 1.0);
}

#[test]
fn initial_guess_recipes() {
    let settings = ProblemSettings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let b = build(ProblemName::OrbitMinTime, NodeFamily::Cg, 30, &settings);
    let chi = b.initial_guess(&mut rng);
    let p = b.full().layout().unpack(&chi).unwrap();
    assert!(p.alphas.iter().flatten().all(|a| (1.0..2.0).contains(a)));
    let tau = &b.full().grid().nodes;
    for (phi, t) in p.controls[0].iter().zip(tau) {
        assert!((phi - std::f64::consts::PI * (t + 1.0) / 2.0).abs() < 1e-15);
    }
    assert_eq!(p.tf, Some(3.0));

    let b = build(ProblemName::RocketLanding, NodeFamily::Cg, 30, &settings);
    let p = b.full().layout().unpack(&b.initial_guess(&mut rng)).unwrap();
    assert!(p.controls[1].iter().all(|&d| d == 0.8));
    let beta = settings.rocket.constants().beta;
    assert!((p.tf.unwrap() * beta - 10.0).abs() < 1e-12);

    let b = build(ProblemName::Breakwell, NodeFamily::Cg, 30, &settings);
    assert!(b.initial_guess(&mut rng).iter().all(|v| (0.0..1.0).contains(v)));
}

#[test]
fn seeded_batches_are_deterministic() {
    let b = build(ProblemName::Breakwell, NodeFamily::Lg, 16, &ProblemSettings::default());
    let opts = SolverOptions { rng_seed: 42, ..SolverOptions::default() };
    let strip = |mut r: dopic::SolveReport| {
        r.wall_time = 0.0;
        r
    };
    let a: Vec<_> = b.batch(4, &opts).unwrap().reports.into_iter().map(strip).collect();
    let c: Vec<_> = b.batch(4, &opts).unwrap().reports.into_iter().map(strip).collect();
    assert_eq!(a, c);
    let single = b.run_trial(&mut ChaCha8Rng::seed_from_u64(44), &opts);
    assert_eq!(strip(single), a[2]);
}

#[test]
fn names_round_trip() {
    for p in ProblemName::ALL {
        assert_eq!(p.as_str().parse::<ProblemName>().unwrap(), p);
        assert_eq!(serde_json::to_string(&p).unwrap(), format!("\"{}\"", p.as_str()));
    }
    assert!("orbit".parse::<ProblemName>().is_err());
}
