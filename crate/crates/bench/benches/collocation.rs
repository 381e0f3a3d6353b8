use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use dopic::poly::{make_grid, BasisSpec, NodeFamily};
use dopic::problems::{Benchmark, ProblemName, ProblemSettings};
use dopic::solver::NlpProblem;
use dopic::build_operator;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn grids(c: &mut Criterion) {
    let mut g = c.benchmark_group("make_grid");
    for family in NodeFamily::ALL {
        for n in [20, 60] {
            g.bench_with_input(BenchmarkId::new(family.label(), n), &n, |b, &n| b.iter(|| make_grid(family, black_box(n)).unwrap()));
        }
    }
    g.finish();
}

fn operators(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_operator");
    for family in [NodeFamily::Cg, NodeFamily::Lgl] {
        let grid = make_grid(family, 40).unwrap();
        g.bench_function(family.label(), |b| b.iter(|| build_operator(family.poly_family(), 40, 2, &grid).unwrap()));
    }
    g.finish();
}

fn evaluation(c: &mut Criterion) {
    let settings = ProblemSettings::default();
    let mut g = c.benchmark_group("evaluate");
    for (name, n) in [(ProblemName::OrbitMinTime, 40), (ProblemName::RocketLanding, 60)] {
        let bench = Benchmark::build(name, BasisSpec::for_grid(NodeFamily::Cg, n), &settings).unwrap();
        let tr = bench.full();
        let x = bench.initial_guess(&mut ChaCha8Rng::seed_from_u64(1));
        let mut eq = vec![0.0; tr.num_equalities()];
        let mut ineq = vec![0.0; tr.num_inequalities()];
        g.bench_function(name.as_str(), |b| b.iter(|| tr.evaluate(black_box(&x), &mut eq, &mut ineq)));
    }
    g.finish();
}

fn solves(c: &mut Criterion) {
    let settings = ProblemSettings::default();
    let mut g = c.benchmark_group("solve");
    g.sample_size(10);
    for (name, n) in [(ProblemName::MinFuel, 30), (ProblemName::Breakwell, 25)] {
        let bench = Benchmark::build(name, BasisSpec::for_grid(NodeFamily::Lgl, n), &settings).unwrap();
        let opts = name.recommended_options();
        g.bench_function(name.as_str(), |b| b.iter(|| bench.run_trial(&mut ChaCha8Rng::seed_from_u64(3), &opts)));
    }
    g.finish();
}

criterion_group!(benches, grids, operators, evaluation, solves);
criterion_main!(benches);
