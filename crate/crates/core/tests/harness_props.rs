use auvplan::grp::GaConfig;
use auvplan::harness::{export_campaign, run_monte_carlo, ExperimentConfig, GaSolver, MetricsRow};
use auvplan::lpp::{Inertia, PsoConfig};
use auvplan::mission::NetworkParams;
use auvplan::Execution;
use proptest::prelude::*;

fn config() -> impl Strategy<Value = ExperimentConfig> {
    (
        (0..=i64::MAX as u64, 1u8..=4, 1usize..500, 0usize..5, 0usize..5),
        (0.5..10.0f64, 100.0..1e5f64, 100.0..1e5f64, 0.0..0.5f64),
        (2usize..300, 1usize..300, 0.0..1.0f64, 0.0..1.0f64),
        (1usize..300, 1usize..200, 0.3..1.0f64, 0.3..1.0f64, any::<bool>(), any::<bool>()),
        (3usize..40, 0usize..40),
    )
        .prop_map(|(a, b, c, d, e)| {
            let mut cfg = ExperimentConfig::default();
            (cfg.seed, cfg.scenario, cfg.repetitions) = (a.0, a.1, a.2);
            cfg.obstacle_counts = (a.3, a.3 + a.4);
            (cfg.vehicle_speed, cfg.route_budget, cfg.mission_budget, cfg.route_reserve) = b;
            cfg.ga = GaConfig {
                population_size: c.0,
                max_iterations: c.1,
                crossover_mix: c.2,
                mutation_probability: c.3,
                elite_count: 1,
                execution: if c.0 % 2 == 0 { Execution::Sequential } else { Execution::Parallel },
                ..GaConfig::default()
            };
            cfg.pso = PsoConfig {
                swarm_size: d.0,
                iterations: d.1,
                inertia: if d.4 { Inertia::Constant(d.2) } else { Inertia::Linear(d.2, d.3) },
                seed_straight_line: d.5,
                ..PsoConfig::default()
            };
            let n = e.0;
            cfg.network = NetworkParams { n_waypoints: n, n_edges: n - 1 + e.1.min(n * (n - 1) / 2 - (n - 1)), ..cfg.network };
            cfg
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn configuration_round_trips_through_toml(cfg in config()) {
        prop_assume!(cfg.validate().is_ok());
        let text = cfg.to_toml();
        prop_assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
    }

    #[test]
    fn metrics_verdict_matches_its_definition(
        violation in prop_oneof![Just(0.0), 0.0..1.0f64],
        t_route in 0.0..2e4f64,
        t_available in 1.0..2e4f64,
    ) {
        let expected = violation == 0.0 && t_route < t_available;
        prop_assert_eq!(MetricsRow::verdict(violation, t_route, t_available), expected);
    }
}

#[test]
fn campaign_rows_are_self_consistent() {
    let cfg = ExperimentConfig {
        network: NetworkParams::new(12, 30),
        ga: GaConfig { population_size: 30, max_iterations: 40, ..GaConfig::default() },
        route_budget: 4000.0,
        ..ExperimentConfig::default()
    };
    let seeds: Vec<u64> = (0..30).collect();
    let c = run_monte_carlo(&cfg, &GaSolver(cfg.ga.clone()), &seeds, Execution::Parallel).unwrap();
    assert_eq!(c.rows.len(), 30);
    assert!(c.rows.iter().all(MetricsRow::is_consistent));
    assert!(c.rows.iter().any(|r| r.feasible));
    assert_eq!(c.violations(), c.rows.iter().filter(|r| r.violation > 0.0).count());
}

#[test]
fn re_exporting_a_campaign_is_byte_identical() {
    let cfg = ExperimentConfig {
        network: NetworkParams::new(10, 20),
        ga: GaConfig { population_size: 20, max_iterations: 20, ..GaConfig::default() },
        ..ExperimentConfig::default()
    };
    let seeds: Vec<u64> = (5..15).collect();
    let run = |exec| run_monte_carlo(&cfg, &GaSolver(cfg.ga.clone()), &seeds, exec).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let files_a = export_campaign(&run(Execution::Parallel), a.path()).unwrap();
    let files_b = export_campaign(&run(Execution::Sequential), b.path()).unwrap();
    assert_eq!(files_a.len(), files_b.len());
    for (fa, fb) in files_a.iter().zip(&files_b) {
        let name = fa.file_name().unwrap().to_string_lossy();
        if name.contains("timing") {
            continue;
        }
        assert_eq!(std::fs::read(fa).unwrap(), std::fs::read(fb).unwrap(), "{name} differs");
    }
}
