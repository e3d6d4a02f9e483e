use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use auvplan::grp::{plan_route, GaConfig};
use auvplan::harness::{run_monte_carlo, scenario_field, ExperimentConfig, GaSolver, Scenario};
use auvplan::lpp::{plan_path, PsoConfig};
use auvplan::mission::{generate_random_network, NetworkParams};
use auvplan::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn pso(c: &mut Criterion) {
    let cfg = ExperimentConfig::default();
    let field = scenario_field(&cfg, Scenario::Composite, 5, 1).unwrap();
    let mut group = c.benchmark_group("pso_150x100");
    group.sample_size(10);
    for (name, execution) in MODES {
        let pso = PsoConfig { execution, ..PsoConfig::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                plan_path(cfg.path.start, cfg.path.target, black_box(&field), cfg.vehicle_speed, &cfg.spline, &pso, 1)
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn ga(c: &mut Criterion) {
    let g = generate_random_network(&NetworkParams::new(50, 735), 1).unwrap();
    let mut group = c.benchmark_group("ga_50_waypoints");
    group.sample_size(10);
    for (name, execution) in MODES {
        let cfg = GaConfig { execution, ..GaConfig::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| plan_route(black_box(&g), 10_800.0, 3.0, &cfg, 1))
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut cfg = ExperimentConfig { repetitions: 20, ..ExperimentConfig::default() };
    cfg.ga.execution = Execution::Sequential;
    let seeds = cfg.campaign_seeds();
    let solver = GaSolver(cfg.ga.clone());
    let mut group = c.benchmark_group("monte_carlo_20_runs");
    group.sample_size(10);
    for (name, execution) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_monte_carlo(black_box(&cfg), &solver, &seeds, execution).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pso, ga, monte_carlo);
criterion_main!(benches);
